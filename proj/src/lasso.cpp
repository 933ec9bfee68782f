#include "fbls/lasso.hpp"

#include <cmath>

#include "fbls/kernels.hpp"

namespace fbls {

namespace {

double top_eigenvalue(const Matrix& g) {
    const std::size_t n = g.rows();
    std::vector<double> v(n, 1.0), w(n, 0.0);
    double norm = std::sqrt(static_cast<double>(n));
    for (double& vi : v) vi /= norm;
    double est = 0.0;
    for (int round = 0; round < 50; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            const double* gi = g.row(i);
            for (std::size_t j = 0; j < n; ++j) acc += gi[j] * v[j];
            w[i] = acc;
        }
        double wn = 0.0;
        for (double wi : w) wn += wi * wi;
        wn = std::sqrt(wn);
        if (wn == 0.0) return 0.0;
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / wn;
        est = wn;
    }
    return est;
}

inline double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

} // namespace

double lasso_1d(double a, double x, double lambda) {
    const double ax = a * x;
    const double mag = std::fabs(ax) - lambda / 2.0;
    if (mag <= 0.0) return 0.0;
    const double sign = ax >= 0.0 ? 1.0 : -1.0;
    return sign * mag / (a * a);
}

Matrix lasso_solve(const LassoProblem& p, LassoTrace* trace) {
    if (p.a1.rows() != p.x.rows()) {
        throw DimensionError("lasso_solve: a1 and x row counts differ");
    }
    if (!(p.lambda > 0.0) || !(p.tol > 0.0)) {
        throw PreconditionError("lasso_solve: lambda and tol must be positive");
    }
    p.a1.require_finite("lasso_solve: a1");
    p.x.require_finite("lasso_solve: x");

    const std::size_t n = p.a1.cols();
    const std::size_t m = p.x.cols();

    // Everything the iteration needs lives in Gram form: G = A1^T A1 and
    // F = A1^T X, so each step costs O(n^2 m) regardless of sample count.
    Matrix g = kernels::matmul_tn(p.a1, p.a1);
    Matrix f = kernels::matmul_tn(p.a1, p.x);
    double x_sq = 0.0;
    for (std::size_t i = 0; i < p.x.size(); ++i) x_sq += p.x.data()[i] * p.x.data()[i];

    Matrix w(n, m);
    const double l_raw = top_eigenvalue(g);
    if (l_raw <= 0.0) {
        if (trace) {
            trace->objective.assign(1, x_sq);
            trace->iterations = 0;
        }
        return w; // A1 is zero; W = 0 is the minimizer.
    }
    // Tiny inflation keeps the step inside the descent regime even when the
    // power iteration slightly underestimates the top eigenvalue.
    const double lip = l_raw * (1.0 + 1e-6);
    const double step = 1.0 / lip;
    const double thresh = p.lambda / (2.0 * lip);

    auto objective = [&](const Matrix& wk, const Matrix& gw) {
        double quad = 0.0, lin = 0.0, l1 = 0.0;
        for (std::size_t i = 0; i < wk.size(); ++i) {
            quad += wk.data()[i] * gw.data()[i];
            lin += wk.data()[i] * f.data()[i];
            l1 += std::fabs(wk.data()[i]);
        }
        return quad - 2.0 * lin + x_sq + p.lambda * l1;
    };

    if (trace) {
        trace->objective.clear();
        trace->iterations = 0;
    }

    Matrix gw(n, m);
    std::size_t iters = 0;
    for (std::size_t k = 0; k < p.max_iters; ++k) {
        kernels::gemm_nn(g, w, gw);
        if (trace) trace->objective.push_back(objective(w, gw));
        double delta = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double v = w.data()[i] - step * (gw.data()[i] - f.data()[i]);
            const double next = soft_threshold(v, thresh);
            const double d = std::fabs(next - w.data()[i]);
            if (d > delta) delta = d;
            w.data()[i] = next;
        }
        ++iters;
        if (delta < p.tol) break;
    }
    if (trace) {
        kernels::gemm_nn(g, w, gw);
        trace->objective.push_back(objective(w, gw));
        trace->iterations = iters;
    }
    return w;
}

} // namespace fbls
