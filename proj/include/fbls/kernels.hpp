#pragma once

#include "fbls/matrix.hpp"

namespace fbls::kernels {

/// Applies the FBLS_THREADS env var (if set) as a cap on OpenMP threads.
void configure_threads_from_env();
void set_threads(int n);

/// Serial reference kernels. Kept for tests and the kernel benchmark; the
/// OpenMP entry points below must match them bit-for-bit because both share
/// the same per-row routines and parallelism never splits an accumulation.
namespace serial {

/// C = A * B
void gemm_nn(const Matrix& a, const Matrix& b, Matrix& c);

/// C = A^T * B
void gemm_tn(const Matrix& a, const Matrix& b, Matrix& c);

} // namespace serial

void gemm_nn(const Matrix& a, const Matrix& b, Matrix& c);
void gemm_tn(const Matrix& a, const Matrix& b, Matrix& c);

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix matmul_tn(const Matrix& a, const Matrix& b);

/// Upper-triangular Cholesky factor U with G = U^T U.
struct CholeskyFactor {
    Matrix u;
};

/// Factors a symmetric positive definite matrix. Returns false (instead of
/// throwing) when a non-positive pivot is hit so callers can fall back to LU.
bool cholesky_factor(const Matrix& g, CholeskyFactor& out);

/// B := G^-1 B given the factor of G.
void cholesky_solve_inplace(const CholeskyFactor& f, Matrix& b);

/// Solves A X = B by partial-pivot LU. Throws NumericError naming the pivot
/// column when the system is singular.
Matrix lu_solve(Matrix a, Matrix b);

/// Solves G X = B for symmetric G: Cholesky first, LU as fallback.
Matrix solve_sym(const Matrix& g, const Matrix& b);

/// Thin Householder QR of a (rows >= cols): returns Q with Q^T Q = I.
Matrix orthonormal_columns(const Matrix& a);

} // namespace fbls::kernels
