#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fbls/data.hpp"
#include "fbls/fuzzy.hpp"
#include "fbls/linalg.hpp"
#include "fbls/matrix.hpp"

namespace fbls {

enum class FeatureMode : std::uint8_t {
    random_sparse, // random projection + lasso autoencoder windows
    fuzzy_ts,      // Takagi-Sugeno fuzzy subsystems
};

struct NetworkConfig {
    std::size_t n1 = 20;   // feature nodes per window
    std::size_t n2 = 10;   // windows
    std::size_t n3 = 2000; // enhancement nodes
    double zoom = 0.8;     // pre-activation scale for enhancement nodes
    double lasso_lambda = 1e-3;
    double ridge_lambda = 1e-8;
    double pinv_lambda = 1e-8;
    std::size_t lasso_max_iters = 50;
    double lasso_tol = 1e-5;
    std::uint64_t seed = 0;
    FeatureMode feature_mode = FeatureMode::random_sparse;
};

/// One feature window: Gaussian projection w_e, lasso-tuned weights w_z
/// (laid out so Z = X_aug * w_z), and the per-node min/max recorded when the
/// window was built. Nodes with node_min == node_max output 0.
struct FeatureWindow {
    Matrix w_e; // (f+1) x nodes
    Matrix w_z; // (f+1) x nodes
    std::vector<double> node_min;
    std::vector<double> node_max;

    std::size_t nodes() const { return node_min.size(); }
};

/// One block of enhancement nodes. z_width records how many feature columns
/// existed when the block was created; train_scale freezes the activation
/// denominator measured on training data.
struct EnhancementBlock {
    Matrix w_h; // (z_width + 1) x nodes
    double train_scale = 0.0;
    std::size_t z_width = 0;

    std::size_t nodes() const { return w_h.cols(); }
};

/// Column layout of the network input A: the order in which window and
/// enhancement blocks were appended. Growth never reorders earlier columns.
struct Segment {
    enum class Kind : std::uint8_t { window, enhancement };
    Kind kind;
    std::size_t index; // into windows/subsystems or enh_blocks
};

struct TrainedModel {
    NetworkConfig config;
    MinMaxStats input_stats;
    std::size_t n_features = 0;
    std::vector<std::string> class_labels;
    std::vector<FeatureWindow> windows;     // random_sparse mode
    std::vector<FuzzySubsystem> subsystems; // fuzzy_ts mode
    std::vector<EnhancementBlock> enh_blocks;
    std::vector<Segment> segments;
    Matrix w_out; // input_width x k

    std::size_t window_count() const {
        return config.feature_mode == FeatureMode::random_sparse ? windows.size()
                                                                 : subsystems.size();
    }
    std::size_t window_nodes(std::size_t i) const {
        return config.feature_mode == FeatureMode::random_sparse ? windows[i].nodes()
                                                                 : subsystems[i].k_rules;
    }
    std::size_t total_feature_nodes() const;
    std::size_t total_enhancement_nodes() const;
    std::size_t input_width() const { return w_out.rows(); }
};

struct Prediction {
    std::vector<std::string> labels;
    Matrix scores; // s x k
};

/// Builds one feature window (cfg.n1 nodes) from the bias-augmented input.
/// Returns the window and its node matrix Z_i with entries in [0, 1].
std::pair<FeatureWindow, Matrix> build_feature_window(const Matrix& x_aug,
                                                      const NetworkConfig& cfg,
                                                      std::size_t window_index);

/// Builds the initial enhancement block (cfg.n3 nodes) from the concatenated
/// feature nodes. Throws NumericError when z is all zero.
std::pair<EnhancementBlock, Matrix> build_enhancement(const Matrix& z,
                                                      const NetworkConfig& cfg);

std::pair<TrainedModel, PinvState> train(const Dataset& ds, const NetworkConfig& cfg);

Prediction predict(const TrainedModel& m, const Matrix& x);

/// Appends `count` enhancement nodes: new orthonormal random block over the
/// current feature nodes, pseudoinverse updated column-block-wise, output
/// weights recomputed as A+ Y.
std::pair<TrainedModel, PinvState> add_enhancement_nodes(const TrainedModel& m,
                                                         const PinvState& st,
                                                         const Dataset& ds,
                                                         std::size_t count);

/// Appends one extra feature window of n_feat nodes, then n_enh enhancement
/// nodes computed from the enlarged feature layer. n_feat must be divisible
/// by the configured window count.
std::pair<TrainedModel, PinvState> add_feature_and_enhancement(const TrainedModel& m,
                                                               const PinvState& st,
                                                               const Dataset& ds,
                                                               std::size_t n_feat,
                                                               std::size_t n_enh);

/// Trains from scratch with the same architecture, block layout, and seed
/// schedule as `reference`. A model grown incrementally and the rebuild of
/// its final architecture agree on weights up to solver tolerance.
TrainedModel train_like(const Dataset& ds, const TrainedModel& reference);

double tansig(double v);

} // namespace fbls
