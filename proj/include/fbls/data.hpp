#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fbls/matrix.hpp"

namespace fbls {

/// Samples, string class labels, and the derived one-hot target matrix.
/// class_labels is the sorted distinct label list; y_onehot columns follow it.
struct Dataset {
    Matrix x;                              // s x f
    std::vector<std::string> labels;       // length s
    Matrix y_onehot;                       // s x k
    std::vector<std::string> class_labels; // length k, lexicographic
    std::vector<double> feature_grid;      // optional wavenumbers (cm^-1), length f or empty

    std::size_t samples() const { return x.rows(); }
    std::size_t features() const { return x.cols(); }
    std::size_t classes() const { return class_labels.size(); }
};

/// Builds the one-hot matrix and class list from raw samples + labels.
Dataset make_dataset(Matrix x, std::vector<std::string> labels,
                     std::vector<double> feature_grid = {});

Dataset load_csv(const std::string& path, const std::string& label_column);
void save_csv(const Dataset& ds, const std::string& path,
              const std::string& label_column = "label");

/// Per-feature min/max recorded from training data. apply() rescales to
/// [0, 1] and clamps; constant features map to 0.
struct MinMaxStats {
    std::vector<double> mins;
    std::vector<double> maxs;

    Matrix apply(const Matrix& x) const;
};

std::pair<Matrix, MinMaxStats> minmax_fit_apply(const Matrix& x);

/// Seeded stratified split; every class keeps its proportion within one
/// sample. Throws if any class is too small to appear in both parts.
std::pair<Dataset, Dataset> split(const Dataset& ds, double test_fraction,
                                  std::uint64_t seed);

/// Recipe for synthetic NIR-like spectra: smooth shared baseline plus
/// class-specific Gaussian absorption bands, with per-sample amplitude
/// jitter, baseline tilt, and additive noise.
struct SynthSpec {
    std::size_t n_classes = 8;
    std::vector<std::size_t> samples_per_class; // empty = 500 each
    std::size_t n_features = 256;
    double wavenumber_lo = 3800.0;
    double wavenumber_hi = 10000.0;
    std::size_t bands_per_class = 5;
    double noise_sigma = 0.01;
    std::uint64_t seed = 0;
};

Dataset gen_synth_spectra(const SynthSpec& spec);

} // namespace fbls
