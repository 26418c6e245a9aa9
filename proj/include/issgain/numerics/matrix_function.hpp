#pragma once

#include <cmath>
#include <concepts>
#include <sstream>
#include <string>

#include "issgain/errors.hpp"
#include "issgain/numerics/matrix.hpp"
#include "issgain/numerics/tridiag_eigen.hpp"

namespace issgain::numerics {

template <typename F>
concept ScalarMap = std::invocable<F, double> && std::convertible_to<std::invoke_result_t<F, double>, double>;

namespace detail {

template <ScalarMap F>
Vector map_spectrum(const Vector& eigenvalues, F&& f) {
    Vector out(eigenvalues.size());
    for (std::size_t j = 0; j < eigenvalues.size(); ++j) {
        out[j] = static_cast<double>(f(eigenvalues[j]));
        if (!std::isfinite(out[j])) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "matrix_function: f is not finite at eigenvalue " << eigenvalues[j];
            throw DomainError(msg.str());
        }
    }
    return out;
}

}  // namespace detail

/// V·diag(f(λ))·Vᵀ for a symmetric decomposition.
template <ScalarMap F>
Matrix matrix_function(const EigenDecomposition& eig, F&& f) {
    const auto fvals = detail::map_spectrum(eig.eigenvalues, f);
    const std::size_t n = eig.size();
    const Matrix& v = eig.eigenvectors;
    Matrix scaled(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            scaled(i, j) = v(i, j) * fvals[j];
        }
    }
    return scaled * v.transpose();
}

}  // namespace issgain::numerics
