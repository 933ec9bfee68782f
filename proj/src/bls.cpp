#include "fbls/bls.hpp"

#include <cmath>
#include <string>

#include "fbls/kernels.hpp"
#include "fbls/lasso.hpp"
#include "fbls/rng.hpp"

namespace fbls {

double tansig(double v) { return 2.0 / (1.0 + std::exp(-2.0 * v)) - 1.0; }

std::size_t TrainedModel::total_feature_nodes() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < window_count(); ++i) n += window_nodes(i);
    return n;
}

std::size_t TrainedModel::total_enhancement_nodes() const {
    std::size_t n = 0;
    for (const EnhancementBlock& b : enh_blocks) n += b.nodes();
    return n;
}

namespace {

Matrix append_bias_column(const Matrix& x) {
    Matrix out(x.rows(), x.cols() + 1);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const double* src = x.row(i);
        double* dst = out.row(i);
        for (std::size_t j = 0; j < x.cols(); ++j) dst[j] = src[j];
        dst[x.cols()] = 1.0;
    }
    return out;
}

void copy_columns(Matrix& dst, std::size_t col0, const Matrix& block) {
    for (std::size_t i = 0; i < block.rows(); ++i) {
        const double* src = block.row(i);
        double* out = dst.row(i) + col0;
        for (std::size_t j = 0; j < block.cols(); ++j) out[j] = src[j];
    }
}

// Column min-max to [0, 1]; constant columns map to 0.
Matrix normalize_columns(const Matrix& m) {
    Matrix out(m.rows(), m.cols());
    for (std::size_t j = 0; j < m.cols(); ++j) {
        double lo = m(0, j), hi = m(0, j);
        for (std::size_t i = 1; i < m.rows(); ++i) {
            lo = std::min(lo, m(i, j));
            hi = std::max(hi, m(i, j));
        }
        const double range = hi - lo;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            out(i, j) = range > 0.0 ? (m(i, j) - lo) / range : 0.0;
        }
    }
    return out;
}

std::pair<FeatureWindow, Matrix> build_window_impl(const Matrix& x_aug,
                                                   const NetworkConfig& cfg,
                                                   std::size_t window_index,
                                                   std::size_t nodes) {
    const std::size_t s = x_aug.rows();
    for (std::size_t i = 0; i < s; ++i) {
        if (x_aug(i, x_aug.cols() - 1) != 1.0) {
            throw PreconditionError("build_feature_window: last column must be the bias (all 1)");
        }
    }
    Rng rng(block_seed(cfg.seed, BlockKind::feature_window, window_index));
    FeatureWindow win;
    win.w_e = random_normal_matrix(x_aug.cols(), nodes, rng);

    Matrix a1 = normalize_columns(kernels::matmul(x_aug, win.w_e));
    LassoProblem prob;
    prob.a1 = std::move(a1);
    prob.x = x_aug;
    prob.lambda = cfg.lasso_lambda;
    prob.max_iters = cfg.lasso_max_iters;
    prob.tol = cfg.lasso_tol;
    win.w_z = transpose(lasso_solve(prob)); // (f+1) x nodes so Z = X_aug * w_z

    Matrix z_raw = kernels::matmul(x_aug, win.w_z);
    win.node_min.resize(nodes);
    win.node_max.resize(nodes);
    Matrix z(s, nodes);
    for (std::size_t j = 0; j < nodes; ++j) {
        double lo = z_raw(0, j), hi = z_raw(0, j);
        for (std::size_t i = 1; i < s; ++i) {
            lo = std::min(lo, z_raw(i, j));
            hi = std::max(hi, z_raw(i, j));
        }
        win.node_min[j] = lo;
        win.node_max[j] = hi;
        const double range = hi - lo;
        for (std::size_t i = 0; i < s; ++i) {
            z(i, j) = range > 0.0 ? (z_raw(i, j) - lo) / range : 0.0;
        }
    }
    return {std::move(win), std::move(z)};
}

// Applies a trained window to new data with the stored normalization.
Matrix apply_window(const FeatureWindow& win, const Matrix& x_aug) {
    Matrix z = kernels::matmul(x_aug, win.w_z);
    for (std::size_t j = 0; j < win.nodes(); ++j) {
        const double lo = win.node_min[j];
        const double range = win.node_max[j] - lo;
        for (std::size_t i = 0; i < z.rows(); ++i) {
            double v = range > 0.0 ? (z(i, j) - lo) / range : 0.0;
            if (v < 0.0) v = 0.0;
            if (v > 1.0) v = 1.0;
            z(i, j) = v;
        }
    }
    return z;
}

std::pair<EnhancementBlock, Matrix> build_enhancement_impl(const Matrix& z,
                                                           const NetworkConfig& cfg,
                                                           std::size_t block_index,
                                                           std::size_t nodes) {
    if (z.empty()) {
        throw PreconditionError("build_enhancement: empty feature matrix");
    }
    if (max_abs(z) == 0.0) {
        throw NumericError("build_enhancement: all-zero feature matrix");
    }
    Matrix h = append_bias_column(z);
    Rng rng(block_seed(cfg.seed, BlockKind::enhancement, block_index));
    Matrix g = random_normal_matrix(h.cols(), nodes, rng);
    EnhancementBlock blk;
    blk.z_width = z.cols();
    if (h.cols() >= nodes) {
        blk.w_h = kernels::orthonormal_columns(g);
    } else {
        blk.w_h = transpose(kernels::orthonormal_columns(transpose(g)));
    }
    Matrix raw = kernels::matmul(h, blk.w_h);
    blk.train_scale = max_abs(raw);
    if (blk.train_scale == 0.0) {
        throw NumericError("build_enhancement: zero activation scale");
    }
    const double scale = cfg.zoom / blk.train_scale;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        raw.data()[i] = tansig(raw.data()[i] * scale);
    }
    return {std::move(blk), std::move(raw)};
}

Matrix apply_enhancement(const EnhancementBlock& blk, const Matrix& z_prefix, double zoom) {
    Matrix h = append_bias_column(z_prefix);
    Matrix raw = kernels::matmul(h, blk.w_h);
    const double scale = zoom / blk.train_scale;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        raw.data()[i] = tansig(raw.data()[i] * scale);
    }
    return raw;
}

Matrix z_prefix_slice(const Matrix& z_all, std::size_t width) {
    if (width == z_all.cols()) return z_all;
    Matrix out(z_all.rows(), width);
    for (std::size_t i = 0; i < z_all.rows(); ++i) {
        const double* src = z_all.row(i);
        double* dst = out.row(i);
        for (std::size_t j = 0; j < width; ++j) dst[j] = src[j];
    }
    return out;
}

struct SegmentPlan {
    Segment::Kind kind;
    std::size_t nodes;
};

// Builds windows, enhancement blocks, A, and the ridge weights for a given
// segment plan. Both initial training and the from-scratch equivalence
// rebuild go through here, so they share one code path and one seed schedule.
std::pair<TrainedModel, PinvState> build_model(const Dataset& ds, const NetworkConfig& cfg,
                                               const std::vector<SegmentPlan>& plan,
                                               bool want_state) {
    if (ds.classes() < 2) {
        throw PreconditionError("train: need at least 2 classes, got " +
                                std::to_string(ds.classes()));
    }
    if (!ds.x.all_finite()) {
        throw DataError("train: non-finite feature values");
    }
    TrainedModel m;
    m.config = cfg;
    m.n_features = ds.features();
    m.class_labels = ds.class_labels;

    auto [x_norm, stats] = minmax_fit_apply(ds.x);
    m.input_stats = std::move(stats);
    Matrix x_aug;
    if (cfg.feature_mode == FeatureMode::random_sparse) {
        x_aug = append_bias_column(x_norm);
    }

    const std::size_t s = ds.samples();
    std::size_t total_cols = 0, total_feature = 0;
    for (const SegmentPlan& p : plan) {
        total_cols += p.nodes;
        if (p.kind == Segment::Kind::window) total_feature += p.nodes;
    }
    Matrix a(s, total_cols);
    Matrix z_all(s, total_feature);
    std::size_t a_off = 0, z_off = 0;

    for (const SegmentPlan& p : plan) {
        if (p.kind == Segment::Kind::window) {
            Matrix z;
            if (cfg.feature_mode == FeatureMode::random_sparse) {
                auto [win, zw] = build_window_impl(x_aug, cfg, m.windows.size(), p.nodes);
                m.windows.push_back(std::move(win));
                z = std::move(zw);
                m.segments.push_back({Segment::Kind::window, m.windows.size() - 1});
            } else {
                const std::uint64_t seed =
                    block_seed(cfg.seed, BlockKind::feature_window, m.subsystems.size());
                FuzzySubsystem sub = build_fuzzy_subsystem(x_norm, p.nodes, seed);
                z = fuzzy_feature_nodes(x_norm, sub);
                m.subsystems.push_back(std::move(sub));
                m.segments.push_back({Segment::Kind::window, m.subsystems.size() - 1});
            }
            copy_columns(z_all, z_off, z);
            copy_columns(a, a_off, z);
            z_off += p.nodes;
            a_off += p.nodes;
        } else {
            auto [blk, h] = build_enhancement_impl(z_prefix_slice(z_all, z_off), cfg,
                                                   m.enh_blocks.size(), p.nodes);
            m.enh_blocks.push_back(std::move(blk));
            m.segments.push_back({Segment::Kind::enhancement, m.enh_blocks.size() - 1});
            copy_columns(a, a_off, h);
            a_off += p.nodes;
        }
    }

    m.w_out = ridge_solve(a, ds.y_onehot, cfg.ridge_lambda);
    PinvState st;
    if (want_state) {
        st.a = std::move(a);
        st.a_pinv = pinv(st.a, cfg.pinv_lambda);
    }
    return {std::move(m), std::move(st)};
}

std::vector<SegmentPlan> plan_of(const TrainedModel& m) {
    std::vector<SegmentPlan> plan;
    plan.reserve(m.segments.size());
    for (const Segment& seg : m.segments) {
        if (seg.kind == Segment::Kind::window) {
            plan.push_back({seg.kind, m.window_nodes(seg.index)});
        } else {
            plan.push_back({seg.kind, m.enh_blocks[seg.index].nodes()});
        }
    }
    return plan;
}

// Gathers the feature-node columns of A (training data) in window order.
Matrix extract_feature_columns(const TrainedModel& m, const Matrix& a) {
    Matrix z(a.rows(), m.total_feature_nodes());
    std::size_t a_off = 0, z_off = 0;
    for (const Segment& seg : m.segments) {
        const std::size_t nodes = seg.kind == Segment::Kind::window
                                      ? m.window_nodes(seg.index)
                                      : m.enh_blocks[seg.index].nodes();
        if (seg.kind == Segment::Kind::window) {
            for (std::size_t i = 0; i < a.rows(); ++i) {
                const double* src = a.row(i) + a_off;
                double* dst = z.row(i) + z_off;
                for (std::size_t j = 0; j < nodes; ++j) dst[j] = src[j];
            }
            z_off += nodes;
        }
        a_off += nodes;
    }
    return z;
}

void check_state(const TrainedModel& m, const PinvState& st, const Dataset& ds) {
    if (st.a.rows() != ds.samples()) {
        throw PreconditionError("grow: state has " + std::to_string(st.a.rows()) +
                                " rows but dataset has " + std::to_string(ds.samples()));
    }
    if (st.a.cols() != m.input_width()) {
        throw StateError("grow: state width " + std::to_string(st.a.cols()) +
                         " does not match model input width " +
                         std::to_string(m.input_width()));
    }
    if (m.class_labels != ds.class_labels) {
        throw PreconditionError("grow: dataset classes differ from the model's");
    }
}

} // namespace

std::pair<FeatureWindow, Matrix> build_feature_window(const Matrix& x_aug,
                                                      const NetworkConfig& cfg,
                                                      std::size_t window_index) {
    return build_window_impl(x_aug, cfg, window_index, cfg.n1);
}

std::pair<EnhancementBlock, Matrix> build_enhancement(const Matrix& z,
                                                      const NetworkConfig& cfg) {
    return build_enhancement_impl(z, cfg, 0, cfg.n3);
}

std::pair<TrainedModel, PinvState> train(const Dataset& ds, const NetworkConfig& cfg) {
    if (cfg.n1 < 1 || cfg.n2 < 1 || cfg.n3 < 1 || !(cfg.zoom > 0.0)) {
        throw PreconditionError("train: n1, n2, n3 must be >= 1 and zoom > 0");
    }
    std::vector<SegmentPlan> plan;
    plan.reserve(cfg.n2 + 1);
    for (std::size_t w = 0; w < cfg.n2; ++w) {
        plan.push_back({Segment::Kind::window, cfg.n1});
    }
    plan.push_back({Segment::Kind::enhancement, cfg.n3});
    return build_model(ds, cfg, plan, true);
}

TrainedModel train_like(const Dataset& ds, const TrainedModel& reference) {
    return build_model(ds, reference.config, plan_of(reference), false).first;
}

Prediction predict(const TrainedModel& m, const Matrix& x) {
    if (x.cols() != m.n_features) {
        throw DimensionError("predict: input has " + std::to_string(x.cols()) +
                             " features, model expects " + std::to_string(m.n_features));
    }
    const std::size_t s = x.rows();
    Matrix x_norm = m.input_stats.apply(x);
    Matrix x_aug;
    if (m.config.feature_mode == FeatureMode::random_sparse) {
        x_aug = append_bias_column(x_norm);
    }

    Matrix a(s, m.input_width());
    Matrix z_all(s, m.total_feature_nodes());
    std::size_t a_off = 0, z_off = 0;
    for (const Segment& seg : m.segments) {
        if (seg.kind == Segment::Kind::window) {
            Matrix z = m.config.feature_mode == FeatureMode::random_sparse
                           ? apply_window(m.windows[seg.index], x_aug)
                           : fuzzy_feature_nodes(x_norm, m.subsystems[seg.index]);
            copy_columns(z_all, z_off, z);
            copy_columns(a, a_off, z);
            z_off += z.cols();
            a_off += z.cols();
        } else {
            const EnhancementBlock& blk = m.enh_blocks[seg.index];
            Matrix h = apply_enhancement(blk, z_prefix_slice(z_all, blk.z_width), m.config.zoom);
            copy_columns(a, a_off, h);
            a_off += h.cols();
        }
    }

    Prediction pred;
    pred.scores = kernels::matmul(a, m.w_out);
    pred.labels.resize(s);
    for (std::size_t i = 0; i < s; ++i) {
        const double* row = pred.scores.row(i);
        std::size_t best = 0;
        for (std::size_t j = 1; j < pred.scores.cols(); ++j) {
            if (row[j] > row[best]) best = j; // ties keep the lowest class index
        }
        pred.labels[i] = m.class_labels[best];
    }
    return pred;
}

std::pair<TrainedModel, PinvState> add_enhancement_nodes(const TrainedModel& m,
                                                         const PinvState& st,
                                                         const Dataset& ds,
                                                         std::size_t count) {
    if (count == 0) return {m, st};
    check_state(m, st, ds);

    Matrix z_all = extract_feature_columns(m, st.a);
    auto [blk, h] =
        build_enhancement_impl(z_all, m.config, m.enh_blocks.size(), count);

    PinvState grown = greville_append(st, h);
    TrainedModel out = m;
    out.enh_blocks.push_back(std::move(blk));
    out.segments.push_back({Segment::Kind::enhancement, out.enh_blocks.size() - 1});
    out.config.n3 += count;
    out.w_out = kernels::matmul(grown.a_pinv, ds.y_onehot);
    return {std::move(out), std::move(grown)};
}

std::pair<TrainedModel, PinvState> add_feature_and_enhancement(const TrainedModel& m,
                                                               const PinvState& st,
                                                               const Dataset& ds,
                                                               std::size_t n_feat,
                                                               std::size_t n_enh) {
    if (n_feat == 0 && n_enh == 0) return {m, st};
    if (n_feat == 0) return add_enhancement_nodes(m, st, ds, n_enh);
    if (n_feat % m.config.n2 != 0) {
        throw PreconditionError("grow: added feature nodes (" + std::to_string(n_feat) +
                                ") must be divisible by the window count (" +
                                std::to_string(m.config.n2) + ")");
    }
    check_state(m, st, ds);

    Matrix x_norm = m.input_stats.apply(ds.x);
    TrainedModel out = m;
    Matrix z_new;
    if (m.config.feature_mode == FeatureMode::random_sparse) {
        Matrix x_aug = append_bias_column(x_norm);
        auto [win, z] = build_window_impl(x_aug, m.config, m.windows.size(), n_feat);
        out.windows.push_back(std::move(win));
        out.segments.push_back({Segment::Kind::window, out.windows.size() - 1});
        z_new = std::move(z);
    } else {
        const std::uint64_t seed =
            block_seed(m.config.seed, BlockKind::feature_window, m.subsystems.size());
        FuzzySubsystem sub = build_fuzzy_subsystem(x_norm, n_feat, seed);
        z_new = fuzzy_feature_nodes(x_norm, sub);
        out.subsystems.push_back(std::move(sub));
        out.segments.push_back({Segment::Kind::window, out.subsystems.size() - 1});
    }

    PinvState grown = greville_append(st, z_new);
    if (n_enh > 0) {
        Matrix z_all = hcat(extract_feature_columns(m, st.a), z_new);
        auto [blk, h] =
            build_enhancement_impl(z_all, m.config, m.enh_blocks.size(), n_enh);
        grown = greville_append(grown, h);
        out.enh_blocks.push_back(std::move(blk));
        out.segments.push_back({Segment::Kind::enhancement, out.enh_blocks.size() - 1});
        out.config.n3 += n_enh;
    }
    out.w_out = kernels::matmul(grown.a_pinv, ds.y_onehot);
    return {std::move(out), std::move(grown)};
}

} // namespace fbls
