#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "genreflow/genre.hpp"

namespace genreflow {

/// One trailer row of the dataset manifest.
struct TrailerRecord {
  std::string id;
  std::string title;
  std::optional<std::filesystem::path> video_path;
  std::optional<std::filesystem::path> audio_path;
  std::string description;
  std::string plot;
  std::vector<std::string> keywords;
  std::vector<Genre> genres;  // canonical order, no duplicates, nonempty

  LabelVector labels() const;
};

/// Column set of the manifest CSV. Order in the file is free; the set is not.
inline constexpr std::array<std::string_view, 8> kManifestColumns = {
    "id", "title", "video_path", "audio_path", "description", "plot", "keywords", "genres"};

/// Reads a UTF-8 manifest CSV. List fields (keywords, genres) are '|'-separated.
/// Errors: MissingColumn, UnknownGenre, DuplicateId, InvalidRecord, IoError.
std::vector<TrailerRecord> load_manifest(const std::filesystem::path& path);
std::vector<TrailerRecord> parse_manifest(std::istream& in, const std::string& source = "<stream>");

/// Writes the normalized form: canonical column order, trimmed fields,
/// canonical genre names in label order.
void write_manifest(std::ostream& out, std::span<const TrailerRecord> records);

struct DatasetSplit {
  std::vector<TrailerRecord> train;
  std::vector<TrailerRecord> eval;
  std::uint64_t seed = 0;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> eval;
};

/// Seeded random partition of [0, n). |eval| = round(eval_fraction * n).
/// Both index lists come back in ascending order. When `strata` is nonempty
/// (one key per item) eval slots are allocated per stratum by largest
/// remainder.
SplitIndices split_indices(std::size_t n, double eval_fraction, std::uint64_t seed,
                           std::span<const std::string> strata = {});

/// Errors: EmptyInput (fewer than 2 records), InvalidArgument (fraction
/// outside (0,1)).
DatasetSplit split_dataset(std::span<const TrailerRecord> records, double eval_fraction,
                           std::uint64_t seed, bool stratified = false);

}  // namespace genreflow
