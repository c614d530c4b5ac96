#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace genreflow {

inline constexpr std::int64_t kDefaultFrameStride = 10;

/// Frames handed to the situation recognizer. Indices are 1-based.
struct FramePlan {
  std::string trailer_id;
  std::vector<std::int64_t> frame_indices;
  int target_width = 299;
  int target_height = 299;
  int target_channels = 3;
};

/// 1, 1 + stride, 1 + 2*stride, ... <= total_frames.
/// Errors: InvalidStride (stride < 1), InvalidArgument (total_frames < 1).
FramePlan plan_frames(std::int64_t total_frames, std::int64_t stride = kDefaultFrameStride,
                      std::string trailer_id = {});

struct AudioChunk {
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;  // exclusive

  std::int64_t duration_ms() const noexcept { return end_ms - start_ms; }
  friend bool operator==(const AudioChunk&, const AudioChunk&) = default;
};

struct SilenceOptions {
  double threshold_db = -40.0;  // relative to full scale (RMS 1.0)
  std::int64_t min_silence_ms = 300;
  std::int64_t min_chunk_ms = 200;
};

struct AudioChunkPlan {
  std::string trailer_id;
  std::vector<AudioChunk> chunks;
};

/// Splits a per-millisecond RMS envelope at silent runs of at least
/// min_silence_ms. A millisecond is silent when 20*log10(rms) is below the
/// threshold. Chunks without any non-silent millisecond, or shorter than
/// min_chunk_ms, are dropped.
AudioChunkPlan chunk_audio(std::span<const double> envelope, const SilenceOptions& options = {},
                           std::string trailer_id = {});

enum class Role { Agent, Item, Part, Place, Stage, Tool };

std::string_view role_name(Role role) noexcept;
std::optional<Role> parse_role(std::string_view name) noexcept;

/// A verb with its semantic-role fillers for one frame, as scored by the
/// situation recognizer (log-probability scale, higher is better).
struct Situation {
  std::string verb;
  std::vector<std::pair<Role, std::string>> roles;
  double score = 0.0;
  std::string definition;  // optional verb gloss supplied by some recognizers

  const std::string* noun(Role role) const;
};

/// Throws InvalidArgument when the verb is empty, a role repeats, or the
/// score is not finite.
void validate_situation(const Situation& situation);

/// Highest score wins; ties go to the lexicographically smallest verb, then
/// to the earliest candidate. Errors: EmptyCandidates.
const Situation& select_situation(std::span<const Situation> candidates);

/// agent, verb, then item, part, place, stage, tool; lowercase and
/// single-spaced, absent roles skipped.
std::string render_situation(const Situation& situation);

}  // namespace genreflow
