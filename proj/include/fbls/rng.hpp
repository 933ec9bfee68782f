#pragma once

#include <cstdint>
#include <random>

#include "fbls/matrix.hpp"

namespace fbls {

/// Deterministic random source. All distribution math is spelled out here so
/// that streams are reproducible bit-for-bit regardless of the standard
/// library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    /// Standard normal via Box-Muller; the paired value is cached.
    double normal();

    /// Uniform index in [0, n).
    std::size_t index(std::size_t n) {
        std::size_t i = static_cast<std::size_t>(uniform01() * static_cast<double>(n));
        return i >= n ? n - 1 : i;
    }

private:
    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

enum class BlockKind : std::uint64_t {
    feature_window = 0x77,
    enhancement = 0xe1,
    consequents = 0xc0,
};

/// Seed for randomness block `index` of a given kind, derived from the run
/// seed. Incremental growth and from-scratch training of the same final
/// architecture draw identical random blocks through this schedule.
std::uint64_t block_seed(std::uint64_t base_seed, BlockKind kind, std::uint64_t index);

Matrix random_normal_matrix(std::size_t rows, std::size_t cols, Rng& rng);
Matrix random_uniform_matrix(std::size_t rows, std::size_t cols, double lo, double hi, Rng& rng);

} // namespace fbls
