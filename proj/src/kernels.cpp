#include "fbls/kernels.hpp"

#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <string>

namespace fbls::kernels {

void set_threads(int n) {
    if (n >= 1) omp_set_num_threads(n);
}

void configure_threads_from_env() {
    const char* env = std::getenv("FBLS_THREADS");
    if (!env) return;
    int n = std::atoi(env);
    if (n >= 1) set_threads(n);
}

namespace {

void check_nn(const Matrix& a, const Matrix& b, const Matrix& c) {
    if (a.cols() != b.rows() || c.rows() != a.rows() || c.cols() != b.cols()) {
        throw DimensionError("gemm_nn: incompatible shapes " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + " * " + std::to_string(b.rows()) + "x" +
                             std::to_string(b.cols()));
    }
}

void check_tn(const Matrix& a, const Matrix& b, const Matrix& c) {
    if (a.rows() != b.rows() || c.rows() != a.cols() || c.cols() != b.cols()) {
        throw DimensionError("gemm_tn: incompatible shapes " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + "^T * " + std::to_string(b.rows()) + "x" +
                             std::to_string(b.cols()));
    }
}

// One output row of C = A * B. The k-accumulation order is fixed, so serial
// and OpenMP paths produce identical bits.
inline void gemm_nn_row(const double* a_row, const Matrix& b, double* c_row) {
    const std::size_t kk = b.rows();
    const std::size_t n = b.cols();
    for (std::size_t j = 0; j < n; ++j) c_row[j] = 0.0;
    for (std::size_t k = 0; k < kk; ++k) {
        const double aik = a_row[k];
        const double* b_row = b.row(k);
        for (std::size_t j = 0; j < n; ++j) {
            c_row[j] += aik * b_row[j];
        }
    }
}

// One output row of C = A^T * B, i.e. row i reads column i of A.
inline void gemm_tn_row(const Matrix& a, std::size_t i, const Matrix& b, double* c_row) {
    const std::size_t s = a.rows();
    const std::size_t n = b.cols();
    for (std::size_t j = 0; j < n; ++j) c_row[j] = 0.0;
    for (std::size_t k = 0; k < s; ++k) {
        const double aki = a(k, i);
        const double* b_row = b.row(k);
        for (std::size_t j = 0; j < n; ++j) {
            c_row[j] += aki * b_row[j];
        }
    }
}

} // namespace

namespace serial {

void gemm_nn(const Matrix& a, const Matrix& b, Matrix& c) {
    check_nn(a, b, c);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        gemm_nn_row(a.row(i), b, c.row(i));
    }
}

void gemm_tn(const Matrix& a, const Matrix& b, Matrix& c) {
    check_tn(a, b, c);
    for (std::size_t i = 0; i < a.cols(); ++i) {
        gemm_tn_row(a, i, b, c.row(i));
    }
}

} // namespace serial

void gemm_nn(const Matrix& a, const Matrix& b, Matrix& c) {
    check_nn(a, b, c);
    const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < m; ++i) {
        gemm_nn_row(a.row(static_cast<std::size_t>(i)), b, c.row(static_cast<std::size_t>(i)));
    }
}

void gemm_tn(const Matrix& a, const Matrix& b, Matrix& c) {
    check_tn(a, b, c);
    const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(a.cols());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < m; ++i) {
        gemm_tn_row(a, static_cast<std::size_t>(i), b, c.row(static_cast<std::size_t>(i)));
    }
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows(), b.cols());
    gemm_nn(a, b, c);
    return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    Matrix c(a.cols(), b.cols());
    gemm_tn(a, b, c);
    return c;
}

bool cholesky_factor(const Matrix& g, CholeskyFactor& out) {
    if (g.rows() != g.cols()) {
        throw DimensionError("cholesky_factor: matrix not square");
    }
    const std::size_t n = g.rows();
    Matrix u = g;
    for (std::size_t k = 0; k < n; ++k) {
        double d = u(k, k);
        if (!(d > 0.0) || !std::isfinite(d)) return false;
        const double ukk = std::sqrt(d);
        u(k, k) = ukk;
        const double inv = 1.0 / ukk;
        double* uk = u.row(k);
        for (std::size_t j = k + 1; j < n; ++j) uk[j] *= inv;
        // Trailing update of the upper triangle; rows are independent.
        const std::ptrdiff_t lo = static_cast<std::ptrdiff_t>(k) + 1;
        const std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = lo; i < hi; ++i) {
            const double uki = uk[i];
            double* ui = u.row(static_cast<std::size_t>(i));
            for (std::ptrdiff_t j = i; j < hi; ++j) {
                ui[j] -= uki * uk[j];
            }
        }
    }
    out.u = std::move(u);
    return true;
}

namespace {

constexpr std::size_t kRhsBlock = 48;

// Forward substitution U^T Y = B over one block of right-hand-side columns.
void forward_block(const Matrix& u, Matrix& b, std::size_t c0, std::size_t c1) {
    const std::size_t n = u.rows();
    for (std::size_t i = 0; i < n; ++i) {
        double* bi = b.row(i);
        for (std::size_t j = 0; j < i; ++j) {
            const double lij = u(j, i);
            const double* bj = b.row(j);
            for (std::size_t c = c0; c < c1; ++c) bi[c] -= lij * bj[c];
        }
        const double inv = 1.0 / u(i, i);
        for (std::size_t c = c0; c < c1; ++c) bi[c] *= inv;
    }
}

// Back substitution U X = Y over one block of right-hand-side columns.
void backward_block(const Matrix& u, Matrix& b, std::size_t c0, std::size_t c1) {
    const std::size_t n = u.rows();
    for (std::size_t ii = n; ii-- > 0;) {
        double* bi = b.row(ii);
        const double* ui = u.row(ii);
        for (std::size_t j = ii + 1; j < n; ++j) {
            const double uij = ui[j];
            const double* bj = b.row(j);
            for (std::size_t c = c0; c < c1; ++c) bi[c] -= uij * bj[c];
        }
        const double inv = 1.0 / ui[ii];
        for (std::size_t c = c0; c < c1; ++c) bi[c] *= inv;
    }
}

} // namespace

void cholesky_solve_inplace(const CholeskyFactor& f, Matrix& b) {
    const std::size_t n = f.u.rows();
    if (b.rows() != n) {
        throw DimensionError("cholesky_solve: rhs rows do not match factor");
    }
    const std::size_t r = b.cols();
    const std::ptrdiff_t nblocks = static_cast<std::ptrdiff_t>((r + kRhsBlock - 1) / kRhsBlock);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t blk = 0; blk < nblocks; ++blk) {
        const std::size_t c0 = static_cast<std::size_t>(blk) * kRhsBlock;
        const std::size_t c1 = std::min(r, c0 + kRhsBlock);
        forward_block(f.u, b, c0, c1);
        backward_block(f.u, b, c0, c1);
    }
}

Matrix lu_solve(Matrix a, Matrix b) {
    if (a.rows() != a.cols()) {
        throw DimensionError("lu_solve: matrix not square");
    }
    if (b.rows() != a.rows()) {
        throw DimensionError("lu_solve: rhs rows do not match");
    }
    const std::size_t n = a.rows();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::fabs(a(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double v = std::fabs(a(i, k));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (best == 0.0 || !std::isfinite(best)) {
            throw NumericError("lu_solve: singular system, zero pivot at column " +
                               std::to_string(k));
        }
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            for (std::size_t j = 0; j < b.cols(); ++j) std::swap(b(k, j), b(piv, j));
        }
        const double inv = 1.0 / a(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a(i, k) * inv;
            a(i, k) = f;
            if (f == 0.0) continue;
            const double* ak = a.row(k);
            double* ai = a.row(i);
            for (std::size_t j = k + 1; j < n; ++j) ai[j] -= f * ak[j];
            const double* bk = b.row(k);
            double* bi = b.row(i);
            for (std::size_t j = 0; j < b.cols(); ++j) bi[j] -= f * bk[j];
        }
    }
    // Back substitution.
    for (std::size_t ii = n; ii-- > 0;) {
        double* bi = b.row(ii);
        const double* ai = a.row(ii);
        for (std::size_t j = ii + 1; j < n; ++j) {
            const double f = ai[j];
            const double* bj = b.row(j);
            for (std::size_t c = 0; c < b.cols(); ++c) bi[c] -= f * bj[c];
        }
        const double inv = 1.0 / ai[ii];
        for (std::size_t c = 0; c < b.cols(); ++c) bi[c] *= inv;
    }
    return b;
}

Matrix solve_sym(const Matrix& g, const Matrix& b) {
    CholeskyFactor f;
    if (cholesky_factor(g, f)) {
        Matrix x = b;
        cholesky_solve_inplace(f, x);
        return x;
    }
    return lu_solve(g, b);
}

Matrix orthonormal_columns(const Matrix& a) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (m < n) {
        throw DimensionError("orthonormal_columns: needs rows >= cols");
    }
    Matrix r = a;
    std::vector<double> tau(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double normx = 0.0;
        for (std::size_t i = k; i < m; ++i) normx += r(i, k) * r(i, k);
        normx = std::sqrt(normx);
        if (normx == 0.0) {
            tau[k] = 0.0;
            continue;
        }
        const double alpha = r(k, k);
        const double beta = alpha >= 0.0 ? -normx : normx;
        tau[k] = (beta - alpha) / beta;
        const double scale = 1.0 / (alpha - beta);
        for (std::size_t i = k + 1; i < m; ++i) r(i, k) *= scale;
        r(k, k) = beta;
        for (std::size_t j = k + 1; j < n; ++j) {
            double w = r(k, j);
            for (std::size_t i = k + 1; i < m; ++i) w += r(i, k) * r(i, j);
            w *= tau[k];
            r(k, j) -= w;
            for (std::size_t i = k + 1; i < m; ++i) r(i, j) -= w * r(i, k);
        }
    }
    // Accumulate the thin Q by applying reflectors to the first n columns of I.
    Matrix q(m, n);
    for (std::size_t i = 0; i < n; ++i) q(i, i) = 1.0;
    for (std::size_t kk = n; kk-- > 0;) {
        if (tau[kk] == 0.0) continue;
        for (std::size_t j = kk; j < n; ++j) {
            double w = q(kk, j);
            for (std::size_t i = kk + 1; i < m; ++i) w += r(i, kk) * q(i, j);
            w *= tau[kk];
            q(kk, j) -= w;
            for (std::size_t i = kk + 1; i < m; ++i) q(i, j) -= w * r(i, kk);
        }
    }
    return q;
}

} // namespace fbls::kernels
