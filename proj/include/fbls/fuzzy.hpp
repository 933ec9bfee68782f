#pragma once

#include <cstdint>
#include <vector>

#include "fbls/matrix.hpp"

namespace fbls {

/// Takagi-Sugeno fuzzy subsystem: k_rules Gaussian rules over f input
/// dimensions. Antecedents come from K-means (centers) and within-cluster
/// spread (sigmas); consequents are fixed random linear coefficients
/// [p_j0 | p_j1 .. p_jf], trained only through the network's output layer.
struct FuzzySubsystem {
    Matrix centers;     // k_rules x f
    Matrix sigmas;      // k_rules x f
    Matrix consequents; // k_rules x (f + 1)
    std::size_t k_rules = 0;
};

inline constexpr double kSigmaFloor = 1e-3;

struct KmeansResult {
    Matrix centers;
    std::vector<std::size_t> assignment;
};

/// K-means++ seeding then Lloyd iterations until max centroid movement
/// < 1e-6 or 100 rounds. Empty clusters are re-seeded to the point farthest
/// from its own center. Deterministic for a given seed.
KmeansResult kmeans(const Matrix& x, std::size_t k, std::uint64_t seed);

/// Per-dimension Gaussian membership exp(-(x_i - c_i)^2 / sigma_i^2).
std::vector<double> membership(const std::vector<double>& x_row,
                               const std::vector<double>& c_row,
                               const std::vector<double>& sigma_row);

/// Normalized rule firing strengths for one input row. Accumulated in log
/// space and normalized by log-sum-exp, so products over hundreds of
/// dimensions cannot underflow.
std::vector<double> firing_strengths(const double* x_row, const FuzzySubsystem& sub);

/// Feature nodes o_j = wbar_j * (p_j0 + sum_i p_ji x_i), one column per rule.
Matrix fuzzy_feature_nodes(const Matrix& x, const FuzzySubsystem& sub);

FuzzySubsystem build_fuzzy_subsystem(const Matrix& x, std::size_t n1, std::uint64_t seed);

} // namespace fbls
