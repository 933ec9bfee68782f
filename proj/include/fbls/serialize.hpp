#pragma once

#include <cstdint>
#include <string>

#include "fbls/bls.hpp"
#include "fbls/linalg.hpp"

namespace fbls {

/// Model file: magic "FBLS", u32 version (little-endian), u64 header length,
/// JSON header (config, mode, dims, class labels, segment layout, checksum),
/// then matrices as u64 rows, u64 cols, row-major little-endian f64.
/// State file: magic "FBLP", same layout, matrices A and A+.
inline constexpr std::uint32_t kFormatVersion = 1;

/// Identifies a trained model so a pseudoinverse state can be matched to it.
std::uint64_t model_checksum(const TrainedModel& m);

/// All writers go through a temp file + rename, so a failed write never
/// leaves a partial file behind.
void save_model(const TrainedModel& m, const std::string& path);
TrainedModel load_model(const std::string& path);

void save_state(const PinvState& st, std::uint64_t checksum, const std::string& path);
std::pair<PinvState, std::uint64_t> load_state(const std::string& path);

} // namespace fbls
