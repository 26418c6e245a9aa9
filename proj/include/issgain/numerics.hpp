#pragma once

#include "issgain/numerics/gamma.hpp"
#include "issgain/numerics/matrix.hpp"
#include "issgain/numerics/matrix_function.hpp"
#include "issgain/numerics/op_norm.hpp"
#include "issgain/numerics/quadrature.hpp"
#include "issgain/numerics/tridiag_eigen.hpp"
