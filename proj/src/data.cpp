#include "fbls/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "fbls/rng.hpp"

namespace fbls {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

bool parse_double(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    auto [p, ec] = std::from_chars(b, e, out);
    if (ec != std::errc{}) return false;
    while (p < e && (*p == ' ' || *p == '\t')) ++p;
    return p == e;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

Dataset make_dataset(Matrix x, std::vector<std::string> labels,
                     std::vector<double> feature_grid) {
    if (x.rows() != labels.size()) {
        throw DimensionError("make_dataset: " + std::to_string(x.rows()) + " rows but " +
                             std::to_string(labels.size()) + " labels");
    }
    x.require_finite("make_dataset: features");
    std::vector<std::string> classes = labels;
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

    Matrix y(labels.size(), classes.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto it = std::lower_bound(classes.begin(), classes.end(), labels[i]);
        y(i, static_cast<std::size_t>(it - classes.begin())) = 1.0;
    }
    Dataset ds;
    ds.x = std::move(x);
    ds.labels = std::move(labels);
    ds.y_onehot = std::move(y);
    ds.class_labels = std::move(classes);
    ds.feature_grid = std::move(feature_grid);
    return ds;
}

Dataset load_csv(const std::string& path, const std::string& label_column) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("load_csv: cannot open " + path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("load_csv: " + path + " is empty");
    }
    const std::vector<std::string> header = split_line(line);
    std::size_t label_idx = header.size();
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == label_column) {
            label_idx = j;
            break;
        }
    }
    if (label_idx == header.size()) {
        throw DataError("load_csv: label column '" + label_column + "' not found in " + path);
    }
    const std::size_t f = header.size() - 1;

    // Feature headers that all parse as numbers are taken as a wavenumber grid.
    std::vector<double> grid;
    grid.reserve(f);
    bool numeric_header = f > 0;
    for (std::size_t j = 0; j < header.size() && numeric_header; ++j) {
        if (j == label_idx) continue;
        double v;
        if (parse_double(header[j], v)) {
            grid.push_back(v);
        } else {
            numeric_header = false;
        }
    }
    if (!numeric_header) grid.clear();

    std::vector<double> values;
    std::vector<std::string> labels;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() && in.eof()) break;
        const std::vector<std::string> cells = split_line(line);
        if (cells.size() != header.size()) {
            throw DataError("load_csv: row " + std::to_string(row) + " has " +
                            std::to_string(cells.size()) + " cells, header has " +
                            std::to_string(header.size()));
        }
        for (std::size_t j = 0; j < cells.size(); ++j) {
            if (j == label_idx) {
                labels.push_back(cells[j]);
                continue;
            }
            double v;
            if (!parse_double(cells[j], v)) {
                throw DataError("load_csv: row " + std::to_string(row) + " column '" +
                                header[j] + "': not a number: '" + cells[j] + "'");
            }
            if (!std::isfinite(v)) {
                throw DataError("load_csv: row " + std::to_string(row) + " column '" +
                                header[j] + "': non-finite value");
            }
            values.push_back(v);
        }
    }
    if (labels.empty()) {
        throw DataError("load_csv: " + path + " has no data rows");
    }
    Matrix x(labels.size(), f);
    std::copy(values.begin(), values.end(), x.data());
    return make_dataset(std::move(x), std::move(labels), std::move(grid));
}

void save_csv(const Dataset& ds, const std::string& path, const std::string& label_column) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("save_csv: cannot open " + path + " for writing");
    }
    out << label_column;
    for (std::size_t j = 0; j < ds.features(); ++j) {
        out << ',';
        if (ds.feature_grid.size() == ds.features()) {
            out << format_double(ds.feature_grid[j]);
        } else {
            out << 'f' << j;
        }
    }
    out << '\n';
    for (std::size_t i = 0; i < ds.samples(); ++i) {
        out << ds.labels[i];
        const double* r = ds.x.row(i);
        for (std::size_t j = 0; j < ds.features(); ++j) {
            out << ',' << format_double(r[j]);
        }
        out << '\n';
    }
    if (!out) {
        throw IoError("save_csv: write failed for " + path);
    }
}

Matrix MinMaxStats::apply(const Matrix& x) const {
    if (x.cols() != mins.size()) {
        throw DimensionError("MinMaxStats::apply: feature count mismatch");
    }
    Matrix out(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const double* src = x.row(i);
        double* dst = out.row(i);
        for (std::size_t j = 0; j < x.cols(); ++j) {
            const double range = maxs[j] - mins[j];
            double v = range > 0.0 ? (src[j] - mins[j]) / range : 0.0;
            if (v < 0.0) v = 0.0;
            if (v > 1.0) v = 1.0;
            dst[j] = v;
        }
    }
    return out;
}

std::pair<Matrix, MinMaxStats> minmax_fit_apply(const Matrix& x) {
    if (x.empty()) {
        throw PreconditionError("minmax_fit_apply: empty matrix");
    }
    MinMaxStats st;
    st.mins.assign(x.cols(), 0.0);
    st.maxs.assign(x.cols(), 0.0);
    for (std::size_t j = 0; j < x.cols(); ++j) {
        double lo = x(0, j), hi = x(0, j);
        for (std::size_t i = 1; i < x.rows(); ++i) {
            lo = std::min(lo, x(i, j));
            hi = std::max(hi, x(i, j));
        }
        st.mins[j] = lo;
        st.maxs[j] = hi;
    }
    return {st.apply(x), std::move(st)};
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0) || !(test_fraction < 1.0)) {
        throw PreconditionError("split: test_fraction must lie in (0, 1)");
    }
    std::map<std::string, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < ds.samples(); ++i) by_class[ds.labels[i]].push_back(i);

    Rng rng(seed);
    std::vector<bool> in_test(ds.samples(), false);
    for (auto& [label, idx] : by_class) {
        const std::size_t n = idx.size();
        if (n < 2) {
            throw PreconditionError("split: class '" + label +
                                    "' has fewer than 2 samples and cannot appear in both splits");
        }
        std::size_t take =
            static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
        take = std::max<std::size_t>(1, std::min(take, n - 1));
        // Fisher-Yates, then the first `take` indices form the test part.
        for (std::size_t i = n - 1; i > 0; --i) {
            const std::size_t j = rng.index(i + 1);
            std::swap(idx[i], idx[j]);
        }
        for (std::size_t i = 0; i < take; ++i) in_test[idx[i]] = true;
    }

    auto extract = [&](bool want_test) {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < ds.samples(); ++i) {
            if (in_test[i] == want_test) rows.push_back(i);
        }
        Matrix x(rows.size(), ds.features());
        std::vector<std::string> labels(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const double* src = ds.x.row(rows[r]);
            std::copy(src, src + ds.features(), x.row(r));
            labels[r] = ds.labels[rows[r]];
        }
        return make_dataset(std::move(x), std::move(labels), ds.feature_grid);
    };
    return {extract(false), extract(true)};
}

Dataset gen_synth_spectra(const SynthSpec& spec) {
    if (spec.n_classes < 2) {
        throw PreconditionError("gen_synth_spectra: need at least 2 classes");
    }
    if (!(spec.wavenumber_lo < spec.wavenumber_hi)) {
        throw PreconditionError("gen_synth_spectra: wavenumber range is empty");
    }
    if (spec.n_features < 2) {
        throw PreconditionError("gen_synth_spectra: need at least 2 features");
    }
    std::vector<std::size_t> per_class = spec.samples_per_class;
    if (per_class.empty()) per_class.assign(spec.n_classes, 500);
    if (per_class.size() != spec.n_classes) {
        throw PreconditionError("gen_synth_spectra: samples_per_class length mismatch");
    }

    const std::size_t f = spec.n_features;
    std::vector<double> grid(f);
    const double step =
        (spec.wavenumber_hi - spec.wavenumber_lo) / static_cast<double>(f - 1);
    for (std::size_t j = 0; j < f; ++j) {
        grid[j] = spec.wavenumber_lo + step * static_cast<double>(j);
    }
    const double span = spec.wavenumber_hi - spec.wavenumber_lo;

    // Shared smooth baseline: a gentle slope plus a few broad bumps.
    Rng base_rng(splitmix64(spec.seed ^ 0xba5e11e5ull));
    std::vector<double> baseline(f, 0.0);
    const double slope = base_rng.uniform(-0.1, 0.1);
    struct Band {
        double center, width, amp;
    };
    std::vector<Band> base_bands(4);
    for (Band& b : base_bands) {
        b.center = base_rng.uniform(spec.wavenumber_lo, spec.wavenumber_hi);
        b.width = base_rng.uniform(0.15, 0.35) * span;
        b.amp = base_rng.uniform(0.2, 0.6);
    }
    for (std::size_t j = 0; j < f; ++j) {
        const double t = (grid[j] - spec.wavenumber_lo) / span;
        double v = 0.8 + slope * t;
        for (const Band& b : base_bands) {
            const double u = (grid[j] - b.center) / b.width;
            v += b.amp * std::exp(-u * u);
        }
        baseline[j] = v;
    }

    // Class templates: one structured band at a class-specific position keeps
    // the classes separable, the remaining bands are seeded per class.
    std::vector<std::vector<Band>> class_bands(spec.n_classes);
    for (std::size_t c = 0; c < spec.n_classes; ++c) {
        Rng crng(splitmix64(spec.seed ^ (0xc1a55000ull + c)));
        std::vector<Band>& bands = class_bands[c];
        Band anchor;
        anchor.center = spec.wavenumber_lo +
                        (static_cast<double>(c) + 0.5) * span / static_cast<double>(spec.n_classes);
        anchor.width = 0.02 * span;
        anchor.amp = 0.9;
        bands.push_back(anchor);
        for (std::size_t b = 1; b < std::max<std::size_t>(spec.bands_per_class, 1); ++b) {
            Band band;
            band.center = crng.uniform(spec.wavenumber_lo, spec.wavenumber_hi);
            band.width = crng.uniform(0.01, 0.05) * span;
            band.amp = crng.uniform(0.2, 0.7);
            bands.push_back(band);
        }
    }

    std::size_t total = 0;
    for (std::size_t n : per_class) total += n;
    Matrix x(total, f);
    std::vector<std::string> labels(total);

    std::size_t row = 0;
    for (std::size_t c = 0; c < spec.n_classes; ++c) {
        char name[32];
        std::snprintf(name, sizeof(name), "class_%02zu", c);
        Rng srng(splitmix64(spec.seed ^ (0x5a3b1e00ull + c)));
        for (std::size_t i = 0; i < per_class[c]; ++i) {
            const double jitter = 1.0 + srng.uniform(-0.1, 0.1);
            const double tilt = srng.uniform(-0.02, 0.02);
            double* dst = x.row(row);
            for (std::size_t j = 0; j < f; ++j) {
                const double t = (grid[j] - spec.wavenumber_lo) / span;
                double v = baseline[j] + tilt * t;
                for (const Band& b : class_bands[c]) {
                    const double u = (grid[j] - b.center) / b.width;
                    v += jitter * b.amp * std::exp(-u * u);
                }
                if (spec.noise_sigma > 0.0) {
                    v += spec.noise_sigma * srng.normal();
                }
                dst[j] = v;
            }
            labels[row] = name;
            ++row;
        }
    }
    return make_dataset(std::move(x), std::move(labels), std::move(grid));
}

} // namespace fbls
