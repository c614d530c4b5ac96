#include "genreflow/plugin.hpp"

#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

#include "genreflow/error.hpp"
#include "genreflow/hash.hpp"

extern char** environ;

namespace genreflow {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json parse_document(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedResponse, std::string("response is not valid JSON: ") + e.what());
  }
}

const json& require_field(const json& doc, const char* name) {
  if (!doc.is_object() || !doc.contains(name)) {
    throw Error(ErrorCode::MalformedResponse, std::string("response lacks '") + name + "'");
  }
  return doc.at(name);
}

Situation parse_candidate(const json& c) {
  if (!c.is_object()) throw Error(ErrorCode::MalformedResponse, "candidate is not an object");
  Situation s;
  const auto& verb = require_field(c, "verb");
  if (!verb.is_string()) throw Error(ErrorCode::MalformedResponse, "candidate verb is not a string");
  s.verb = verb.get<std::string>();
  const auto& score = require_field(c, "score");
  if (!score.is_number()) throw Error(ErrorCode::MalformedResponse, "candidate score is not a number");
  s.score = score.get<double>();
  if (c.contains("roles")) {
    const auto& roles = c.at("roles");
    if (!roles.is_object()) throw Error(ErrorCode::MalformedResponse, "candidate roles is not an object");
    for (const auto& [name, noun] : roles.items()) {
      auto role = parse_role(name);
      if (!role) throw Error(ErrorCode::MalformedResponse, "unknown role '" + name + "'");
      if (!noun.is_string()) throw Error(ErrorCode::MalformedResponse, "role '" + name + "' noun is not a string");
      s.roles.emplace_back(*role, noun.get<std::string>());
    }
    std::stable_sort(s.roles.begin(), s.roles.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
  }
  if (c.contains("definition")) {
    if (!c.at("definition").is_string()) throw Error(ErrorCode::MalformedResponse, "definition is not a string");
    s.definition = c.at("definition").get<std::string>();
  }
  try {
    validate_situation(s);
  } catch (const Error& e) {
    throw Error(ErrorCode::MalformedResponse, e.what());
  }
  return s;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::PluginFailure, "plugin wrote no response at " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
}

struct ExchangePaths {
  fs::path request;
  fs::path response;
};

ExchangePaths exchange_paths(const SubprocessOptions& options, const std::string& trailer_id, PluginMode mode) {
  std::error_code ec;
  fs::create_directories(options.work_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create plugin work dir " + options.work_dir.string());
  std::string stem = exchange_stem(trailer_id) + "." + std::string(plugin_mode_name(mode));
  return {options.work_dir / (stem + ".request.json"), options.work_dir / (stem + ".response.json")};
}

std::string exchange(const SubprocessOptions& options, const std::string& trailer_id, PluginMode mode,
                     const std::string& request) {
  if (options.executable.empty()) {
    throw Error(ErrorCode::PluginFailure, "no plugin executable configured for " +
                                              std::string(plugin_mode_name(mode)));
  }
  auto paths = exchange_paths(options, trailer_id, mode);
  std::error_code ec;
  fs::remove(paths.response, ec);
  write_file(paths.request, request);
  return run_plugin(options.executable, mode, paths.request, paths.response, options.timeout).response;
}

}  // namespace

std::string_view plugin_mode_name(PluginMode mode) noexcept {
  switch (mode) {
    case PluginMode::SpeechProbe: return "speech-probe";
    case PluginMode::Speech: return "speech";
    case PluginMode::SituationProbe: return "situation-probe";
    case PluginMode::Situation: return "situation";
  }
  return "unknown";
}

std::string speech_probe_request_json(const std::string& trailer_id, const fs::path& audio_path) {
  return json{{"trailer_id", trailer_id}, {"audio_path", audio_path.string()}}.dump();
}

std::string situation_probe_request_json(const std::string& trailer_id, const fs::path& video_path) {
  return json{{"trailer_id", trailer_id}, {"video_path", video_path.string()}}.dump();
}

std::string speech_request_json(const SpeechRequest& request) {
  json chunks = json::array();
  for (const auto& c : request.chunks) chunks.push_back({{"start_ms", c.start_ms}, {"end_ms", c.end_ms}});
  return json{{"trailer_id", request.trailer_id},
              {"audio_path", request.audio_path.string()},
              {"chunks", std::move(chunks)}}
      .dump();
}

std::string situation_request_json(const SituationRequest& request) {
  return json{{"trailer_id", request.trailer_id},
              {"video_path", request.video_path.string()},
              {"frame_indices", request.frame_indices},
              {"width", request.width},
              {"height", request.height}}
      .dump();
}

std::vector<double> parse_envelope_response(std::string_view text) {
  auto doc = parse_document(text);
  const auto& env = require_field(doc, "envelope_ms");
  if (!env.is_array()) throw Error(ErrorCode::MalformedResponse, "envelope_ms is not an array");
  std::vector<double> out;
  out.reserve(env.size());
  for (const auto& v : env) {
    if (!v.is_number()) throw Error(ErrorCode::MalformedResponse, "envelope value is not a number");
    out.push_back(v.get<double>());
  }
  return out;
}

std::int64_t parse_frame_count_response(std::string_view text) {
  auto doc = parse_document(text);
  const auto& n = require_field(doc, "total_frames");
  if (!n.is_number_integer() || n.get<std::int64_t>() < 0) {
    throw Error(ErrorCode::MalformedResponse, "total_frames must be a non-negative integer");
  }
  return n.get<std::int64_t>();
}

std::vector<std::string> parse_speech_response(std::string_view text, const SpeechRequest& request) {
  auto doc = parse_document(text);
  const auto& transcripts = require_field(doc, "transcripts");
  if (!transcripts.is_array()) throw Error(ErrorCode::MalformedResponse, "transcripts is not an array");
  if (transcripts.size() < request.chunks.size()) {
    const auto& missing = request.chunks[transcripts.size()];
    throw Error(ErrorCode::MissingEntry, "no transcript for chunk " + std::to_string(transcripts.size()) + " (" +
                                             std::to_string(missing.start_ms) + "-" +
                                             std::to_string(missing.end_ms) + " ms)");
  }
  if (transcripts.size() > request.chunks.size()) {
    throw Error(ErrorCode::MalformedResponse, "more transcripts than requested chunks");
  }
  std::vector<std::string> out;
  for (const auto& t : transcripts) {
    if (!t.is_string()) throw Error(ErrorCode::MalformedResponse, "transcript is not a string");
    out.push_back(t.get<std::string>());
  }
  return out;
}

std::vector<FrameCandidates> parse_situation_response(std::string_view text, const SituationRequest& request) {
  auto doc = parse_document(text);
  const auto& frames = require_field(doc, "frames");
  if (!frames.is_array()) throw Error(ErrorCode::MalformedResponse, "frames is not an array");

  std::map<std::int64_t, std::size_t> slot;
  for (std::size_t i = 0; i < request.frame_indices.size(); ++i) slot.emplace(request.frame_indices[i], i);
  std::vector<FrameCandidates> out(request.frame_indices.size());
  std::vector<char> filled(out.size(), 0);

  for (const auto& f : frames) {
    const auto& index = require_field(f, "index");
    if (!index.is_number_integer()) throw Error(ErrorCode::MalformedResponse, "frame index is not an integer");
    auto it = slot.find(index.get<std::int64_t>());
    if (it == slot.end()) {
      throw Error(ErrorCode::MalformedResponse, "frame " + index.dump() + " was not requested");
    }
    if (filled[it->second]) throw Error(ErrorCode::MalformedResponse, "frame " + index.dump() + " answered twice");
    const auto& candidates = require_field(f, "candidates");
    if (!candidates.is_array()) throw Error(ErrorCode::MalformedResponse, "candidates is not an array");
    auto& entry = out[it->second];
    entry.index = it->first;
    for (const auto& c : candidates) entry.candidates.push_back(parse_candidate(c));
    if (entry.candidates.empty()) {
      throw Error(ErrorCode::MissingEntry, "frame " + std::to_string(entry.index) + " has no candidates");
    }
    filled[it->second] = 1;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!filled[i]) {
      throw Error(ErrorCode::MissingEntry, "no response for frame " + std::to_string(request.frame_indices[i]));
    }
  }
  return out;
}

std::vector<Situation> best_situations(std::span<const FrameCandidates> frames) {
  std::vector<Situation> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(select_situation(f.candidates));
  return out;
}

PluginExchange run_plugin(const fs::path& executable, PluginMode mode, const fs::path& request_path,
                          const fs::path& response_path, std::chrono::milliseconds timeout) {
  std::string exe = executable.string();
  std::string mode_arg(plugin_mode_name(mode));
  std::string req = request_path.string();
  std::string resp = response_path.string();
  std::vector<char*> argv = {exe.data(), mode_arg.data(), req.data(), resp.data(), nullptr};

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  // plugin chatter goes to stderr so CLI stdout stays clean
  posix_spawn_file_actions_adddup2(&actions, STDERR_FILENO, STDOUT_FILENO);
  pid_t pid = 0;
  int rc = posix_spawn(&pid, exe.c_str(), &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    throw Error(ErrorCode::PluginFailure, "cannot start plugin " + exe + ": " + std::strerror(rc));
  }

  const auto deadline = std::chrono::steady_clock::now() + timeout;
  int status = 0;
  auto pause = std::chrono::microseconds(200);
  for (;;) {
    pid_t done = waitpid(pid, &status, WNOHANG);
    if (done == pid) break;
    if (done < 0 && errno != EINTR) throw Error(ErrorCode::PluginFailure, "waitpid failed for " + exe);
    if (std::chrono::steady_clock::now() >= deadline) {
      kill(pid, SIGKILL);
      waitpid(pid, &status, 0);
      throw Error(ErrorCode::PluginTimeout, std::string(plugin_mode_name(mode)) + " plugin exceeded " +
                                                std::to_string(timeout.count()) + " ms");
    }
    std::this_thread::sleep_for(pause);
    pause = std::min(pause * 2, std::chrono::microseconds(20000));
  }
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw Error(ErrorCode::PluginFailure,
                std::string(plugin_mode_name(mode)) + " plugin exited abnormally (status " +
                    std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1) + ")");
  }
  return {mode, request_path, response_path, read_file(response_path)};
}

std::chrono::milliseconds plugin_timeout_from_env(std::chrono::milliseconds fallback) {
  const char* value = std::getenv("GENREFLOW_PLUGIN_TIMEOUT_MS");
  if (!value || !*value) return fallback;
  char* end = nullptr;
  long long ms = std::strtoll(value, &end, 10);
  if (*end != '\0' || ms <= 0) return fallback;
  return std::chrono::milliseconds(ms);
}

std::string exchange_stem(const std::string& trailer_id) {
  std::string safe;
  for (char c : trailer_id.substr(0, 48)) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
    safe.push_back(ok ? c : '_');
  }
  return safe + "-" + sha256_hex(trailer_id).substr(0, 12);
}

SubprocessSpeechRecognizer::SubprocessSpeechRecognizer(SubprocessOptions options) : options_(std::move(options)) {}

std::vector<double> SubprocessSpeechRecognizer::envelope(const std::string& trailer_id, const fs::path& audio_path) {
  return parse_envelope_response(
      exchange(options_, trailer_id, PluginMode::SpeechProbe, speech_probe_request_json(trailer_id, audio_path)));
}

std::vector<std::string> SubprocessSpeechRecognizer::transcribe(const SpeechRequest& request) {
  if (request.chunks.empty()) return {};
  return parse_speech_response(
      exchange(options_, request.trailer_id, PluginMode::Speech, speech_request_json(request)), request);
}

SubprocessSituationRecognizer::SubprocessSituationRecognizer(SubprocessOptions options)
    : options_(std::move(options)) {}

std::int64_t SubprocessSituationRecognizer::frame_count(const std::string& trailer_id, const fs::path& video_path) {
  return parse_frame_count_response(exchange(options_, trailer_id, PluginMode::SituationProbe,
                                             situation_probe_request_json(trailer_id, video_path)));
}

std::vector<FrameCandidates> SubprocessSituationRecognizer::recognize(const SituationRequest& request) {
  if (request.frame_indices.empty()) return {};
  return parse_situation_response(
      exchange(options_, request.trailer_id, PluginMode::Situation, situation_request_json(request)), request);
}

}  // namespace genreflow
