#include "genreflow/media.hpp"

#include <array>
#include <cctype>
#include <cmath>

#include "genreflow/error.hpp"

namespace genreflow {
namespace {

constexpr std::array<std::string_view, 6> kRoleNames = {"agent", "item", "part", "place", "stage", "tool"};

void append_words(std::string& out, std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i == start) continue;
    if (!out.empty()) out.push_back(' ');
    for (std::size_t k = start; k < i; ++k) {
      char c = text[k];
      out.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c);
    }
  }
}

}  // namespace

FramePlan plan_frames(std::int64_t total_frames, std::int64_t stride, std::string trailer_id) {
  if (stride < 1) throw Error(ErrorCode::InvalidStride, "frame stride must be >= 1, got " + std::to_string(stride));
  if (total_frames < 1) throw Error(ErrorCode::InvalidArgument, "trailer has no frames");
  FramePlan plan;
  plan.trailer_id = std::move(trailer_id);
  plan.frame_indices.reserve(static_cast<std::size_t>((total_frames + stride - 1) / stride));
  for (std::int64_t f = 1; f <= total_frames; f += stride) plan.frame_indices.push_back(f);
  return plan;
}

AudioChunkPlan chunk_audio(std::span<const double> envelope, const SilenceOptions& options,
                           std::string trailer_id) {
  if (envelope.empty()) throw Error(ErrorCode::InvalidArgument, "audio envelope is empty");
  if (options.min_silence_ms < 1) throw Error(ErrorCode::InvalidArgument, "min_silence_ms must be >= 1");

  const auto n = static_cast<std::int64_t>(envelope.size());
  std::vector<char> silent(envelope.size());
  for (std::size_t i = 0; i < envelope.size(); ++i) {
    double rms = std::abs(envelope[i]);
    silent[i] = rms <= 0.0 || 20.0 * std::log10(rms) < options.threshold_db;
  }

  AudioChunkPlan plan;
  plan.trailer_id = std::move(trailer_id);
  std::int64_t chunk_start = 0;
  bool chunk_has_sound = false;
  auto close_chunk = [&](std::int64_t end) {
    AudioChunk c{chunk_start, end};
    if (chunk_has_sound && c.duration_ms() >= options.min_chunk_ms && c.duration_ms() > 0) {
      plan.chunks.push_back(c);
    }
  };

  std::int64_t i = 0;
  while (i < n) {
    if (!silent[i]) {
      chunk_has_sound = true;
      ++i;
      continue;
    }
    std::int64_t run_start = i;
    while (i < n && silent[i]) ++i;
    if (i - run_start >= options.min_silence_ms) {
      close_chunk(run_start);
      chunk_start = i;
      chunk_has_sound = false;
    }
  }
  if (chunk_start < n) close_chunk(n);
  return plan;
}

std::string_view role_name(Role role) noexcept { return kRoleNames[static_cast<std::size_t>(role)]; }

std::optional<Role> parse_role(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kRoleNames.size(); ++i) {
    if (kRoleNames[i] == name) return static_cast<Role>(i);
  }
  return std::nullopt;
}

const std::string* Situation::noun(Role role) const {
  for (const auto& [r, n] : roles) {
    if (r == role) return &n;
  }
  return nullptr;
}

void validate_situation(const Situation& situation) {
  if (situation.verb.empty()) throw Error(ErrorCode::InvalidArgument, "situation verb is empty");
  if (!std::isfinite(situation.score)) {
    throw Error(ErrorCode::InvalidArgument, "situation '" + situation.verb + "' has a non-finite score");
  }
  std::array<bool, 6> seen{};
  for (const auto& [role, noun] : situation.roles) {
    auto& flag = seen[static_cast<std::size_t>(role)];
    if (flag) {
      throw Error(ErrorCode::InvalidArgument, "role '" + std::string(role_name(role)) + "' repeated");
    }
    flag = true;
  }
}

const Situation& select_situation(std::span<const Situation> candidates) {
  if (candidates.empty()) throw Error(ErrorCode::EmptyCandidates, "no situation candidates");
  const Situation* best = &candidates.front();
  for (const auto& c : candidates.subspan(1)) {
    if (c.score > best->score || (c.score == best->score && c.verb < best->verb)) best = &c;
  }
  return *best;
}

std::string render_situation(const Situation& situation) {
  std::string out;
  if (const auto* agent = situation.noun(Role::Agent)) append_words(out, *agent);
  append_words(out, situation.verb);
  for (Role r : {Role::Item, Role::Part, Role::Place, Role::Stage, Role::Tool}) {
    if (const auto* n = situation.noun(r)) append_words(out, *n);
  }
  return out;
}

}  // namespace genreflow
