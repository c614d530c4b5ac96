#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "genreflow/media.hpp"

namespace genreflow {

// External recognizers run as subprocesses and talk through JSON files:
//
//   <executable> <mode> <request.json> <response.json>
//
//   speech-probe     {trailer_id, audio_path}                 -> {envelope_ms:[rms]}
//   speech           {trailer_id, audio_path, chunks:[{start_ms,end_ms}]}
//                                                             -> {transcripts:[string]}
//   situation-probe  {trailer_id, video_path}                 -> {total_frames:int}
//   situation        {trailer_id, video_path, frame_indices:[int], width:299, height:299}
//                    -> {frames:[{index, candidates:[{verb, roles:{role:noun}, score}]}]}

enum class PluginMode { SpeechProbe, Speech, SituationProbe, Situation };

std::string_view plugin_mode_name(PluginMode mode) noexcept;

struct SpeechRequest {
  std::string trailer_id;
  std::filesystem::path audio_path;
  std::vector<AudioChunk> chunks;
};

struct SituationRequest {
  std::string trailer_id;
  std::filesystem::path video_path;
  std::vector<std::int64_t> frame_indices;
  int width = 299;
  int height = 299;
};

struct FrameCandidates {
  std::int64_t index = 0;
  std::vector<Situation> candidates;
};

std::string speech_probe_request_json(const std::string& trailer_id, const std::filesystem::path& audio_path);
std::string situation_probe_request_json(const std::string& trailer_id, const std::filesystem::path& video_path);
std::string speech_request_json(const SpeechRequest& request);
std::string situation_request_json(const SituationRequest& request);

// Response parsers validate against the request. Errors: MalformedResponse,
// MissingEntry (a requested chunk or frame has no entry).
std::vector<double> parse_envelope_response(std::string_view json);
std::int64_t parse_frame_count_response(std::string_view json);
std::vector<std::string> parse_speech_response(std::string_view json, const SpeechRequest& request);
/// Frames come back in request order.
std::vector<FrameCandidates> parse_situation_response(std::string_view json, const SituationRequest& request);

/// Per-frame argmax over candidates, in frame order.
std::vector<Situation> best_situations(std::span<const FrameCandidates> frames);

struct PluginExchange {
  PluginMode mode;
  std::filesystem::path request_path;
  std::filesystem::path response_path;
  std::string response;
};

/// Spawns the plugin on an already-written request file and returns the raw
/// response document. Errors: PluginFailure (spawn failure, nonzero exit,
/// no response file), PluginTimeout.
PluginExchange run_plugin(const std::filesystem::path& executable, PluginMode mode,
                          const std::filesystem::path& request_path,
                          const std::filesystem::path& response_path, std::chrono::milliseconds timeout);

/// GENREFLOW_PLUGIN_TIMEOUT_MS, or `fallback` when unset/invalid.
std::chrono::milliseconds plugin_timeout_from_env(std::chrono::milliseconds fallback = std::chrono::seconds(60));

class SpeechRecognizer {
 public:
  virtual ~SpeechRecognizer() = default;
  virtual std::vector<double> envelope(const std::string& trailer_id, const std::filesystem::path& audio_path) = 0;
  /// One transcript per requested chunk, in chunk order.
  virtual std::vector<std::string> transcribe(const SpeechRequest& request) = 0;
};

class SituationRecognizer {
 public:
  virtual ~SituationRecognizer() = default;
  virtual std::int64_t frame_count(const std::string& trailer_id, const std::filesystem::path& video_path) = 0;
  virtual std::vector<FrameCandidates> recognize(const SituationRequest& request) = 0;
};

struct SubprocessOptions {
  std::filesystem::path executable;
  std::filesystem::path work_dir;  // exchange files land here, one set per trailer
  std::chrono::milliseconds timeout = std::chrono::seconds(60);
};

/// Exchange file stem for one trailer; distinct ids never collide.
std::string exchange_stem(const std::string& trailer_id);

class SubprocessSpeechRecognizer final : public SpeechRecognizer {
 public:
  explicit SubprocessSpeechRecognizer(SubprocessOptions options);
  std::vector<double> envelope(const std::string& trailer_id, const std::filesystem::path& audio_path) override;
  std::vector<std::string> transcribe(const SpeechRequest& request) override;

 private:
  SubprocessOptions options_;
};

class SubprocessSituationRecognizer final : public SituationRecognizer {
 public:
  explicit SubprocessSituationRecognizer(SubprocessOptions options);
  std::int64_t frame_count(const std::string& trailer_id, const std::filesystem::path& video_path) override;
  std::vector<FrameCandidates> recognize(const SituationRequest& request) override;

 private:
  SubprocessOptions options_;
};

}  // namespace genreflow
