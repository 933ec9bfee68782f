#pragma once

#include "fbls/matrix.hpp"

namespace fbls {

/// Retained network input A (s x n) together with its regularized
/// pseudoinverse A+ (n x s). Growing the network appends columns to `a` and
/// updates `a_pinv` without refactoring the whole system.
struct PinvState {
    Matrix a;
    Matrix a_pinv;
};

/// W = (lambda I + A^T A)^-1 A^T Y, the minimizer of |AW - Y|^2 + lambda |W|^2.
/// lambda = 0 requires A^T A to be numerically nonsingular.
Matrix ridge_solve(const Matrix& a, const Matrix& y, double lambda);

/// Regularized pseudoinverse (lambda_floor I + A^T A)^-1 A^T. The floor keeps
/// the system invertible for any A.
Matrix pinv(const Matrix& a, double lambda_floor);

PinvState make_pinv_state(const Matrix& a, double lambda_floor);

/// State for [A | new_cols]. Column blocks whose residual against range(A)
/// is nonzero use b^T = c+; blocks inside the range use
/// b^T = (I + d^T d)^-1 d^T A+. Mixed blocks are split at the boundary.
PinvState greville_append(const PinvState& state, const Matrix& new_cols);

namespace detail {
/// Relative tolerance deciding that a residual column c is zero.
inline constexpr double kGrevilleRelTol = 1e-10;
/// Columns processed per block inside greville_append.
inline constexpr std::size_t kGrevilleChunk = 256;
} // namespace detail

} // namespace fbls
