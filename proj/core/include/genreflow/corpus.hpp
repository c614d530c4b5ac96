#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "genreflow/error.hpp"
#include "genreflow/genre.hpp"
#include "genreflow/manifest.hpp"
#include "genreflow/media.hpp"
#include "genreflow/plugin.hpp"

namespace genreflow {

enum class Modality { Situation, Dialogue, Metadata };

/// Which text streams feed the fused corpus. {S} is M_S, {D,M} is M_D and
/// all three is M_SD.
struct ModalityMask {
  bool situation = true;
  bool dialogue = true;
  bool metadata = true;

  /// Comma-separated subset of S, D, M (case-insensitive). Throws
  /// InvalidArgument on unknown letters or an empty mask.
  static ModalityMask parse(std::string_view text);
  std::string to_string() const;
  std::string model_label() const;
  bool empty() const noexcept { return !situation && !dialogue && !metadata; }
  bool enabled(Modality m) const noexcept;
};

using FusionOrder = std::array<Modality, 3>;

/// Dialogue, situation, metadata: the procedural order of the training loop.
inline constexpr FusionOrder kDefaultFusionOrder = {Modality::Dialogue, Modality::Situation, Modality::Metadata};

/// Permutation of "D,S,M".
FusionOrder parse_fusion_order(std::string_view text);
std::string fusion_order_to_string(const FusionOrder& order);

struct TrailerCorpus {
  std::string trailer_id;
  std::string c_s;  // situations
  std::string c_d;  // dialogue
  std::string c_m;  // metadata
  std::string c_sd; // fused
};

struct CorpusSet {
  std::vector<TrailerCorpus> corpora;
  std::vector<LabelVector> labels;  // aligned with corpora
};

std::string build_situation_corpus(std::span<const Situation> situations, bool include_definitions = false);
std::string build_dialogue_corpus(std::span<const std::string> transcripts);
std::string build_metadata_corpus(const TrailerRecord& record);

/// Joins already-normalized parts with single spaces, skipping empty ones.
std::string fuse(std::string_view c_d, std::string_view c_s, std::string_view c_m,
                 const FusionOrder& order = kDefaultFusionOrder);

struct PipelineOptions {
  std::int64_t frame_stride = kDefaultFrameStride;
  SilenceOptions silence;
  ModalityMask modalities;
  FusionOrder order = kDefaultFusionOrder;
  std::filesystem::path media_root;  // relative media paths resolve against this
  bool verb_definitions = false;
  std::size_t workers = 1;
};

struct Recognizers {
  SpeechRecognizer* speech = nullptr;
  SituationRecognizer* situation = nullptr;
};

/// One trailer through frame sampling, situation selection, audio chunking,
/// transcription and fusion. Shared by training and inference. Errors carry
/// the trailer id.
TrailerCorpus prepare_inference_corpus(const TrailerRecord& record, const Recognizers& recognizers,
                                       const PipelineOptions& options);

struct TrailerOutcome {
  std::string trailer_id;
  std::optional<TrailerCorpus> corpus;
  std::optional<Error> error;
};

/// Runs every record (concurrently up to options.workers); results keep
/// input order and failures are captured per trailer.
std::vector<TrailerOutcome> build_corpora(std::span<const TrailerRecord> records, const Recognizers& recognizers,
                                          const PipelineOptions& options);

/// Throws the first failure in input order, or AllEmptyCorpus when every
/// fused corpus is empty.
CorpusSet build_training_corpus(std::span<const TrailerRecord> records, const Recognizers& recognizers,
                                const PipelineOptions& options);
CorpusSet build_training_corpus(const DatasetSplit& split, const Recognizers& recognizers,
                                const PipelineOptions& options);

/// One line of the corpus artifact: `id<TAB>label_bits<TAB>c_sd`.
struct CorpusEntry {
  std::string trailer_id;
  LabelVector labels;
  std::string text;
};

std::vector<CorpusEntry> to_entries(const CorpusSet& set);
void write_corpus(std::ostream& out, std::span<const CorpusEntry> entries);
void write_corpus(std::ostream& out, const CorpusSet& set);
/// Errors: MalformedFile, DuplicateId.
std::vector<CorpusEntry> read_corpus(std::istream& in);

}  // namespace genreflow
