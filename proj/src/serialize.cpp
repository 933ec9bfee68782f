#include "fbls/serialize.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace fbls {

static_assert(std::endian::native == std::endian::little,
              "serialized formats assume a little-endian host");

namespace {

using nlohmann::json;

void write_u32(std::ostream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void write_u64(std::ostream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t read_u32(std::istream& in) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

std::uint64_t read_u64(std::istream& in) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

void write_matrix(std::ostream& out, const Matrix& m) {
    write_u64(out, m.rows());
    write_u64(out, m.cols());
    out.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(m.size() * sizeof(double)));
}

Matrix read_matrix(std::istream& in, const std::string& path) {
    const std::uint64_t rows = read_u64(in);
    const std::uint64_t cols = read_u64(in);
    if (!in || rows * cols > (1ull << 33)) {
        throw IoError("load: corrupt matrix header in " + path);
    }
    Matrix m(rows, cols);
    in.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
    if (!in) {
        throw IoError("load: truncated matrix data in " + path);
    }
    return m;
}

Matrix vector_as_row(const std::vector<double>& v) {
    Matrix m(1, v.size());
    std::memcpy(m.data(), v.data(), v.size() * sizeof(double));
    return m;
}

std::vector<double> row_as_vector(const Matrix& m) {
    return {m.data(), m.data() + m.size()};
}

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

// Writes through a temp file and renames into place.
template <typename Fn>
void atomic_write(const std::string& path, Fn&& fn) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("save: cannot open " + tmp + " for writing");
        }
        fn(out);
        if (!out) {
            throw IoError("save: write failed for " + tmp);
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw IoError("save: cannot rename " + tmp + " to " + path + ": " + ec.message());
    }
}

const char* mode_name(FeatureMode m) {
    return m == FeatureMode::random_sparse ? "random_sparse" : "fuzzy_ts";
}

FeatureMode mode_from_name(const std::string& s, const std::string& path) {
    if (s == "random_sparse") return FeatureMode::random_sparse;
    if (s == "fuzzy_ts") return FeatureMode::fuzzy_ts;
    throw IoError("load: unknown feature mode '" + s + "' in " + path);
}

} // namespace

std::uint64_t model_checksum(const TrainedModel& m) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    const std::uint64_t seed = m.config.seed;
    h = fnv1a(h, &seed, sizeof seed);
    const std::uint64_t dims[3] = {m.n_features, m.input_width(),
                                   m.class_labels.size()};
    h = fnv1a(h, dims, sizeof dims);
    for (const std::string& s : m.class_labels) {
        h = fnv1a(h, s.data(), s.size());
        h = fnv1a(h, "\0", 1);
    }
    for (const Segment& seg : m.segments) {
        const std::uint64_t rec[2] = {static_cast<std::uint64_t>(seg.kind), seg.index};
        h = fnv1a(h, rec, sizeof rec);
    }
    h = fnv1a(h, m.w_out.data(), m.w_out.size() * sizeof(double));
    return h;
}

void save_model(const TrainedModel& m, const std::string& path) {
    json header;
    header["format"] = kFormatVersion;
    header["feature_mode"] = mode_name(m.config.feature_mode);
    header["config"] = {
        {"n1", m.config.n1},
        {"n2", m.config.n2},
        {"n3", m.config.n3},
        {"zoom", m.config.zoom},
        {"lasso_lambda", m.config.lasso_lambda},
        {"ridge_lambda", m.config.ridge_lambda},
        {"pinv_lambda", m.config.pinv_lambda},
        {"lasso_max_iters", m.config.lasso_max_iters},
        {"lasso_tol", m.config.lasso_tol},
        {"seed", m.config.seed},
    };
    header["n_features"] = m.n_features;
    header["class_labels"] = m.class_labels;
    json segs = json::array();
    for (const Segment& seg : m.segments) {
        segs.push_back({{"kind", seg.kind == Segment::Kind::window ? "window" : "enh"},
                        {"index", seg.index}});
    }
    header["segments"] = segs;
    json scales = json::array();
    for (const EnhancementBlock& b : m.enh_blocks) scales.push_back(b.train_scale);
    header["enh_train_scales"] = scales;
    header["checksum"] = model_checksum(m);
    const std::string header_str = header.dump();

    atomic_write(path, [&](std::ostream& out) {
        out.write("FBLS", 4);
        write_u32(out, kFormatVersion);
        write_u64(out, header_str.size());
        out.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));
        write_matrix(out, vector_as_row(m.input_stats.mins));
        write_matrix(out, vector_as_row(m.input_stats.maxs));
        for (const Segment& seg : m.segments) {
            if (seg.kind == Segment::Kind::window) {
                if (m.config.feature_mode == FeatureMode::random_sparse) {
                    const FeatureWindow& w = m.windows[seg.index];
                    write_matrix(out, w.w_e);
                    write_matrix(out, w.w_z);
                    write_matrix(out, vector_as_row(w.node_min));
                    write_matrix(out, vector_as_row(w.node_max));
                } else {
                    const FuzzySubsystem& sub = m.subsystems[seg.index];
                    write_matrix(out, sub.centers);
                    write_matrix(out, sub.sigmas);
                    write_matrix(out, sub.consequents);
                }
            } else {
                write_matrix(out, m.enh_blocks[seg.index].w_h);
            }
        }
        write_matrix(out, m.w_out);
    });
}

TrainedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("load_model: cannot open " + path);
    }
    char magic[4] = {};
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "FBLS", 4) != 0) {
        throw IoError("load_model: " + path + " is not a model file (bad magic)");
    }
    const std::uint32_t version = read_u32(in);
    if (version != kFormatVersion) {
        throw IoError("load_model: unsupported format version " + std::to_string(version));
    }
    const std::uint64_t hlen = read_u64(in);
    std::string header_str(hlen, '\0');
    in.read(header_str.data(), static_cast<std::streamsize>(hlen));
    if (!in) {
        throw IoError("load_model: truncated header in " + path);
    }
    json header = json::parse(header_str, nullptr, false);
    if (header.is_discarded()) {
        throw IoError("load_model: corrupt header in " + path);
    }

    TrainedModel m;
    m.config.feature_mode = mode_from_name(header.at("feature_mode"), path);
    const json& c = header.at("config");
    m.config.n1 = c.at("n1");
    m.config.n2 = c.at("n2");
    m.config.n3 = c.at("n3");
    m.config.zoom = c.at("zoom");
    m.config.lasso_lambda = c.at("lasso_lambda");
    m.config.ridge_lambda = c.at("ridge_lambda");
    m.config.pinv_lambda = c.at("pinv_lambda");
    m.config.lasso_max_iters = c.at("lasso_max_iters");
    m.config.lasso_tol = c.at("lasso_tol");
    m.config.seed = c.at("seed");
    m.n_features = header.at("n_features");
    m.class_labels = header.at("class_labels").get<std::vector<std::string>>();
    const std::vector<double> scales =
        header.at("enh_train_scales").get<std::vector<double>>();

    m.input_stats.mins = row_as_vector(read_matrix(in, path));
    m.input_stats.maxs = row_as_vector(read_matrix(in, path));
    for (const json& js : header.at("segments")) {
        const std::string kind = js.at("kind");
        if (kind == "window") {
            if (m.config.feature_mode == FeatureMode::random_sparse) {
                FeatureWindow w;
                w.w_e = read_matrix(in, path);
                w.w_z = read_matrix(in, path);
                w.node_min = row_as_vector(read_matrix(in, path));
                w.node_max = row_as_vector(read_matrix(in, path));
                m.segments.push_back({Segment::Kind::window, m.windows.size()});
                m.windows.push_back(std::move(w));
            } else {
                FuzzySubsystem sub;
                sub.centers = read_matrix(in, path);
                sub.sigmas = read_matrix(in, path);
                sub.consequents = read_matrix(in, path);
                sub.k_rules = sub.centers.rows();
                m.segments.push_back({Segment::Kind::window, m.subsystems.size()});
                m.subsystems.push_back(std::move(sub));
            }
        } else if (kind == "enh") {
            EnhancementBlock b;
            b.w_h = read_matrix(in, path);
            b.z_width = b.w_h.rows() - 1;
            if (m.enh_blocks.size() >= scales.size()) {
                throw IoError("load_model: enhancement scale list too short in " + path);
            }
            b.train_scale = scales[m.enh_blocks.size()];
            m.segments.push_back({Segment::Kind::enhancement, m.enh_blocks.size()});
            m.enh_blocks.push_back(std::move(b));
        } else {
            throw IoError("load_model: unknown segment kind '" + kind + "' in " + path);
        }
    }
    m.w_out = read_matrix(in, path);

    const std::uint64_t stored = header.at("checksum");
    if (stored != model_checksum(m)) {
        throw IoError("load_model: checksum mismatch, " + path + " is corrupt");
    }
    return m;
}

void save_state(const PinvState& st, std::uint64_t checksum, const std::string& path) {
    json header;
    header["format"] = kFormatVersion;
    header["checksum"] = checksum;
    const std::string header_str = header.dump();
    atomic_write(path, [&](std::ostream& out) {
        out.write("FBLP", 4);
        write_u32(out, kFormatVersion);
        write_u64(out, header_str.size());
        out.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));
        write_matrix(out, st.a);
        write_matrix(out, st.a_pinv);
    });
}

std::pair<PinvState, std::uint64_t> load_state(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("load_state: cannot open " + path);
    }
    char magic[4] = {};
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "FBLP", 4) != 0) {
        throw IoError("load_state: " + path + " is not a state file (bad magic)");
    }
    const std::uint32_t version = read_u32(in);
    if (version != kFormatVersion) {
        throw IoError("load_state: unsupported format version " + std::to_string(version));
    }
    const std::uint64_t hlen = read_u64(in);
    std::string header_str(hlen, '\0');
    in.read(header_str.data(), static_cast<std::streamsize>(hlen));
    if (!in) {
        throw IoError("load_state: truncated header in " + path);
    }
    json header = json::parse(header_str, nullptr, false);
    if (header.is_discarded()) {
        throw IoError("load_state: corrupt header in " + path);
    }
    PinvState st;
    st.a = read_matrix(in, path);
    st.a_pinv = read_matrix(in, path);
    return {std::move(st), header.at("checksum").get<std::uint64_t>()};
}

} // namespace fbls
