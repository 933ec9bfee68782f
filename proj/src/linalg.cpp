#include "fbls/linalg.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "fbls/kernels.hpp"

namespace fbls {

namespace {

Matrix gram_plus_lambda(const Matrix& a, double lambda) {
    Matrix g = kernels::matmul_tn(a, a);
    for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) += lambda;
    return g;
}

Matrix col_slice(const Matrix& m, std::size_t j0, std::size_t j1) {
    Matrix out(m.rows(), j1 - j0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double* src = m.row(i) + j0;
        double* dst = out.row(i);
        for (std::size_t j = 0; j < out.cols(); ++j) dst[j] = src[j];
    }
    return out;
}

std::vector<double> column_norms(const Matrix& m) {
    std::vector<double> n(m.cols(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double* r = m.row(i);
        for (std::size_t j = 0; j < m.cols(); ++j) n[j] += r[j] * r[j];
    }
    for (double& v : n) v = std::sqrt(v);
    return n;
}

// Builds the grown state [A | block] with a_pinv = [old - d*bt; bt].
PinvState stack_update(const PinvState& st, const Matrix& block, const Matrix& d,
                       const Matrix& bt) {
    const std::size_t n = st.a_pinv.rows();
    const std::size_t s = st.a_pinv.cols();
    const std::size_t m = block.cols();
    Matrix correction = kernels::matmul(d, bt); // n x s
    PinvState out;
    out.a = hcat(st.a, block);
    out.a_pinv = Matrix(n + m, s);
    for (std::size_t i = 0; i < n; ++i) {
        const double* old_row = st.a_pinv.row(i);
        const double* corr_row = correction.row(i);
        double* dst = out.a_pinv.row(i);
        for (std::size_t j = 0; j < s; ++j) dst[j] = old_row[j] - corr_row[j];
    }
    for (std::size_t i = 0; i < m; ++i) {
        const double* src = bt.row(i);
        double* dst = out.a_pinv.row(n + i);
        for (std::size_t j = 0; j < s; ++j) dst[j] = src[j];
    }
    return out;
}

// Single-column Greville step; exact for any rank profile.
PinvState append_one(const PinvState& st, const Matrix& col) {
    Matrix d = kernels::matmul(st.a_pinv, col); // n x 1
    Matrix ad = kernels::matmul(st.a, d);       // s x 1
    Matrix c(col.rows(), 1);
    double c_norm2 = 0.0;
    double a_norm2 = 0.0;
    for (std::size_t i = 0; i < col.rows(); ++i) {
        c(i, 0) = col(i, 0) - ad(i, 0);
        c_norm2 += c(i, 0) * c(i, 0);
        a_norm2 += col(i, 0) * col(i, 0);
    }
    const double tol = detail::kGrevilleRelTol * std::sqrt(a_norm2);
    Matrix bt(1, st.a.rows());
    if (std::sqrt(c_norm2) > tol && c_norm2 > 0.0) {
        const double inv = 1.0 / c_norm2;
        for (std::size_t j = 0; j < c.rows(); ++j) bt(0, j) = c(j, 0) * inv;
    } else {
        double dtd = 0.0;
        for (std::size_t i = 0; i < d.rows(); ++i) dtd += d(i, 0) * d(i, 0);
        const double inv = 1.0 / (1.0 + dtd);
        Matrix dt_ap = kernels::matmul_tn(d, st.a_pinv); // 1 x s
        for (std::size_t j = 0; j < bt.cols(); ++j) bt(0, j) = dt_ap(0, j) * inv;
    }
    return stack_update(st, col, d, bt);
}

// Block step for columns that all share a branch, with d and c precomputed.
// Falls back to per-column processing when the residual Gram matrix is not
// safely factorable (nearly collinear columns inside one block).
PinvState append_block(const PinvState& st, const Matrix& block, const Matrix& d,
                       const Matrix& c, bool independent) {
    Matrix bt;
    if (independent) {
        Matrix gram = kernels::matmul_tn(c, c); // m x m
        kernels::CholeskyFactor f;
        if (!kernels::cholesky_factor(gram, f)) {
            PinvState cur = st;
            for (std::size_t j = 0; j < block.cols(); ++j) {
                cur = append_one(cur, col_slice(block, j, j + 1));
            }
            return cur;
        }
        bt = transpose(c);
        kernels::cholesky_solve_inplace(f, bt); // (c^T c)^-1 c^T
    } else {
        Matrix gram = kernels::matmul_tn(d, d); // m x m
        for (std::size_t i = 0; i < gram.rows(); ++i) gram(i, i) += 1.0;
        bt = kernels::matmul_tn(d, st.a_pinv); // m x s
        kernels::CholeskyFactor f;
        if (kernels::cholesky_factor(gram, f)) {
            kernels::cholesky_solve_inplace(f, bt);
        } else {
            bt = kernels::lu_solve(gram, bt);
        }
    }
    return stack_update(st, block, d, bt);
}

} // namespace

Matrix ridge_solve(const Matrix& a, const Matrix& y, double lambda) {
    if (a.empty() || y.empty()) {
        throw PreconditionError("ridge_solve: empty operand");
    }
    if (a.rows() != y.rows()) {
        throw DimensionError("ridge_solve: A has " + std::to_string(a.rows()) +
                             " rows but Y has " + std::to_string(y.rows()));
    }
    if (lambda < 0.0) {
        throw PreconditionError("ridge_solve: lambda must be nonnegative");
    }
    Matrix g = gram_plus_lambda(a, lambda);
    Matrix rhs = kernels::matmul_tn(a, y);
    return kernels::solve_sym(g, rhs);
}

Matrix pinv(const Matrix& a, double lambda_floor) {
    if (a.empty()) {
        throw PreconditionError("pinv: empty matrix");
    }
    if (!(lambda_floor > 0.0)) {
        throw PreconditionError("pinv: lambda_floor must be positive");
    }
    Matrix g = gram_plus_lambda(a, lambda_floor);
    Matrix rhs = transpose(a);
    kernels::CholeskyFactor f;
    if (kernels::cholesky_factor(g, f)) {
        kernels::cholesky_solve_inplace(f, rhs);
        return rhs;
    }
    return kernels::lu_solve(g, rhs);
}

PinvState make_pinv_state(const Matrix& a, double lambda_floor) {
    return PinvState{a, pinv(a, lambda_floor)};
}

PinvState greville_append(const PinvState& state, const Matrix& new_cols) {
    if (new_cols.empty()) {
        throw PreconditionError("greville_append: no columns to append");
    }
    if (new_cols.rows() != state.a.rows()) {
        throw DimensionError("greville_append: new columns have " +
                             std::to_string(new_cols.rows()) + " rows, state expects " +
                             std::to_string(state.a.rows()));
    }
    PinvState cur = state;
    std::size_t j = 0;
    while (j < new_cols.cols()) {
        const std::size_t j1 = std::min(new_cols.cols(), j + detail::kGrevilleChunk);
        Matrix chunk = col_slice(new_cols, j, j1);
        Matrix d = kernels::matmul(cur.a_pinv, chunk);
        Matrix ad = kernels::matmul(cur.a, d);
        Matrix c = chunk;
        for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] -= ad.data()[i];
        const std::vector<double> cn = column_norms(c);
        const std::vector<double> an = column_norms(chunk);
        const bool first_indep = cn[0] > detail::kGrevilleRelTol * an[0];
        std::size_t run = 1;
        while (run < chunk.cols() &&
               (cn[run] > detail::kGrevilleRelTol * an[run]) == first_indep) {
            ++run;
        }
        if (run < chunk.cols()) {
            chunk = col_slice(chunk, 0, run);
            d = col_slice(d, 0, run);
            c = col_slice(c, 0, run);
        }
        cur = append_block(cur, chunk, d, c, first_indep);
        j += run;
    }
    return cur;
}

} // namespace fbls
