#pragma once

#include <cstddef>
#include <vector>

#include "fbls/matrix.hpp"

namespace fbls {

/// min |A1 W - X|_2^2 + lambda |W|_1 over W (a1.cols x x.cols).
struct LassoProblem {
    Matrix a1;
    Matrix x;
    double lambda = 1e-3;
    std::size_t max_iters = 50;
    double tol = 1e-5;
};

/// Per-iterate objective values; objective[0] is the value at W = 0.
struct LassoTrace {
    std::vector<double> objective;
    std::size_t iterations = 0;
};

/// ISTA: gradient step of 1/L on the quadratic term (L = top eigenvalue of
/// A1^T A1 from 50 power-iteration rounds) followed by soft-thresholding at
/// lambda/(2L), which is the proximal map of lambda |.|_1 for this step.
/// Stops after max_iters or when the iterate moves less than tol (max-abs).
Matrix lasso_solve(const LassoProblem& p, LassoTrace* trace = nullptr);

/// Closed-form 1-D lasso minimizer, argmin (a w - x)^2 + lambda |w|.
double lasso_1d(double a, double x, double lambda);

} // namespace fbls
