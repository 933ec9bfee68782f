#include "fbls/fuzzy.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "fbls/rng.hpp"

namespace fbls {

namespace {

double dist2(const double* a, const double* b, std::size_t f) {
    double d = 0.0;
    for (std::size_t i = 0; i < f; ++i) {
        const double t = a[i] - b[i];
        d += t * t;
    }
    return d;
}

} // namespace

KmeansResult kmeans(const Matrix& x, std::size_t k, std::uint64_t seed) {
    const std::size_t s = x.rows();
    const std::size_t f = x.cols();
    if (k < 1 || k > s) {
        throw PreconditionError("kmeans: need 1 <= k <= sample count, got k=" +
                                std::to_string(k) + " for " + std::to_string(s) + " samples");
    }
    Rng rng(seed);
    Matrix centers(k, f);

    // k-means++ seeding.
    std::vector<double> d2(s, std::numeric_limits<double>::max());
    {
        const std::size_t first = rng.index(s);
        for (std::size_t j = 0; j < f; ++j) centers(0, j) = x(first, j);
    }
    for (std::size_t c = 1; c < k; ++c) {
        const double* prev = centers.row(c - 1);
        double total = 0.0;
        for (std::size_t i = 0; i < s; ++i) {
            const double d = dist2(x.row(i), prev, f);
            if (d < d2[i]) d2[i] = d;
            total += d2[i];
        }
        std::size_t pick;
        if (total > 0.0) {
            const double u = rng.uniform01() * total;
            double acc = 0.0;
            pick = s - 1;
            for (std::size_t i = 0; i < s; ++i) {
                acc += d2[i];
                if (acc > u) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = rng.index(s); // all points coincide with chosen centers
        }
        for (std::size_t j = 0; j < f; ++j) centers(c, j) = x(pick, j);
    }

    std::vector<std::size_t> assignment(s, 0);
    std::vector<double> own_d2(s, 0.0);
    std::vector<double> sums(k * f, 0.0);
    std::vector<std::size_t> counts(k, 0);

    auto assign_pass = [&]() {
        const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(s);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
            const std::size_t i = static_cast<std::size_t>(ii);
            const double* xi = x.row(i);
            double best = dist2(xi, centers.row(0), f);
            std::size_t best_c = 0;
            for (std::size_t c = 1; c < k; ++c) {
                const double d = dist2(xi, centers.row(c), f);
                if (d < best) {
                    best = d;
                    best_c = c;
                }
            }
            assignment[i] = best_c;
            own_d2[i] = best;
        }
    };

    for (int iter = 0; iter < 100; ++iter) {
        assign_pass();

        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < s; ++i) {
            const std::size_t c = assignment[i];
            const double* xi = x.row(i);
            double* dst = sums.data() + c * f;
            for (std::size_t j = 0; j < f; ++j) dst[j] += xi[j];
            ++counts[c];
        }

        double moved = 0.0;
        std::vector<bool> reseeded(s, false);
        for (std::size_t c = 0; c < k; ++c) {
            double* row = centers.row(c);
            if (counts[c] > 0) {
                const double inv = 1.0 / static_cast<double>(counts[c]);
                double m2 = 0.0;
                for (std::size_t j = 0; j < f; ++j) {
                    const double nv = sums[c * f + j] * inv;
                    const double dj = nv - row[j];
                    m2 += dj * dj;
                    row[j] = nv;
                }
                moved = std::max(moved, std::sqrt(m2));
            } else {
                // Re-seed to the farthest point from its own center.
                std::size_t far_i = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < s; ++i) {
                    if (!reseeded[i] && own_d2[i] > far_d) {
                        far_d = own_d2[i];
                        far_i = i;
                    }
                }
                reseeded[far_i] = true;
                double m2 = 0.0;
                const double* xi = x.row(far_i);
                for (std::size_t j = 0; j < f; ++j) {
                    const double dj = xi[j] - row[j];
                    m2 += dj * dj;
                    row[j] = xi[j];
                }
                moved = std::max(moved, std::sqrt(m2));
            }
        }
        if (moved < 1e-6) break;
    }
    assign_pass(); // make the returned assignment consistent with the centers
    return KmeansResult{std::move(centers), std::move(assignment)};
}

std::vector<double> membership(const std::vector<double>& x_row,
                               const std::vector<double>& c_row,
                               const std::vector<double>& sigma_row) {
    if (x_row.size() != c_row.size() || x_row.size() != sigma_row.size()) {
        throw DimensionError("membership: vector lengths differ");
    }
    std::vector<double> mu(x_row.size());
    for (std::size_t i = 0; i < x_row.size(); ++i) {
        const double t = (x_row[i] - c_row[i]) / sigma_row[i];
        mu[i] = std::exp(-t * t);
    }
    return mu;
}

std::vector<double> firing_strengths(const double* x_row, const FuzzySubsystem& sub) {
    const std::size_t k = sub.k_rules;
    const std::size_t f = sub.centers.cols();
    std::vector<double> logw(k);
    for (std::size_t j = 0; j < k; ++j) {
        const double* c = sub.centers.row(j);
        const double* sig = sub.sigmas.row(j);
        double acc = 0.0;
        for (std::size_t i = 0; i < f; ++i) {
            const double t = (x_row[i] - c[i]) / sig[i];
            acc -= t * t;
        }
        logw[j] = acc;
    }
    double m = logw[0];
    for (std::size_t j = 1; j < k; ++j) m = std::max(m, logw[j]);
    double z = 0.0;
    std::vector<double> w(k);
    for (std::size_t j = 0; j < k; ++j) {
        w[j] = std::exp(logw[j] - m);
        z += w[j];
    }
    const double inv = 1.0 / z;
    for (std::size_t j = 0; j < k; ++j) w[j] *= inv;
    return w;
}

Matrix fuzzy_feature_nodes(const Matrix& x, const FuzzySubsystem& sub) {
    if (x.cols() != sub.centers.cols()) {
        throw DimensionError("fuzzy_feature_nodes: input has " + std::to_string(x.cols()) +
                             " features, subsystem expects " +
                             std::to_string(sub.centers.cols()));
    }
    const std::size_t s = x.rows();
    const std::size_t f = x.cols();
    const std::size_t k = sub.k_rules;
    Matrix out(s, k);
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(s);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ri = 0; ri < n; ++ri) {
        const std::size_t i = static_cast<std::size_t>(ri);
        const double* xi = x.row(i);
        const std::vector<double> w = firing_strengths(xi, sub);
        double* dst = out.row(i);
        for (std::size_t j = 0; j < k; ++j) {
            const double* p = sub.consequents.row(j);
            double q = p[0];
            for (std::size_t d = 0; d < f; ++d) q += p[d + 1] * xi[d];
            dst[j] = w[j] * q;
        }
    }
    return out;
}

FuzzySubsystem build_fuzzy_subsystem(const Matrix& x, std::size_t n1, std::uint64_t seed) {
    const std::size_t s = x.rows();
    const std::size_t f = x.cols();
    if (s < n1) {
        throw PreconditionError("build_fuzzy_subsystem: fewer samples than rules");
    }
    KmeansResult km = kmeans(x, n1, seed);

    Matrix sigmas(n1, f, 0.0);
    std::vector<std::size_t> counts(n1, 0);
    for (std::size_t i = 0; i < s; ++i) {
        const std::size_t c = km.assignment[i];
        const double* xi = x.row(i);
        const double* ci = km.centers.row(c);
        double* sg = sigmas.row(c);
        for (std::size_t j = 0; j < f; ++j) {
            const double t = xi[j] - ci[j];
            sg[j] += t * t;
        }
        ++counts[c];
    }
    for (std::size_t c = 0; c < n1; ++c) {
        double* sg = sigmas.row(c);
        const double inv = counts[c] > 0 ? 1.0 / static_cast<double>(counts[c]) : 0.0;
        for (std::size_t j = 0; j < f; ++j) {
            sg[j] = std::max(std::sqrt(sg[j] * inv), kSigmaFloor);
        }
    }

    Rng cons_rng(block_seed(seed, BlockKind::consequents, 0));
    Matrix consequents = random_uniform_matrix(n1, f + 1, -1.0, 1.0, cons_rng);
    return FuzzySubsystem{std::move(km.centers), std::move(sigmas), std::move(consequents), n1};
}

} // namespace fbls
