#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "genreflow/models.hpp"

namespace genreflow {

inline constexpr std::uint16_t kCheckpointVersion = 1;

/// Binary layout, little-endian:
///   "GFLOWCKP" u16 version
///   u32 n, n bytes of JSON {config, feature_hash, history}
///   u32 tensor count, then per tensor: u16 name length, name,
///   u32 rows, u32 cols, rows*cols float32.
/// Parameters are stored as float32; a round trip is exact to float precision.
void save_checkpoint(const TrainedModel& model, std::ostream& out);
void save_checkpoint(const TrainedModel& model, const std::filesystem::path& path);

/// Rebuilds the network from the stored config and loads its parameters.
/// Errors: CorruptCheckpoint (bad magic, truncation, tensor mismatch,
/// trailing bytes), VersionMismatch (newer format), IoError.
TrainedModel load_checkpoint(std::istream& in);
TrainedModel load_checkpoint(const std::filesystem::path& path);

}  // namespace genreflow
