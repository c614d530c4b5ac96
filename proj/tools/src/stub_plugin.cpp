// Deterministic stand-in for the speech and situation recognizers. It reads
// fixture JSON documents in place of real media:
//
//   audio: {"envelope": [[duration_ms, rms], ...], "transcripts": [string, ...]}
//   video: {"total_frames": N, "scenes": {"<first_frame>": [candidate, ...]}}
//
// A frame takes the candidates of the scene with the largest start <= frame;
// frames before every scene are left out of the response. Either document
// may set "fail": true (exit 1) or "sleep_ms" (delay before answering).

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <thread>

using nlohmann::json;

namespace {

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return json::parse(in);
}

void honour_directives(const json& media) {
  if (media.value("sleep_ms", 0) > 0) {
    std::this_thread::sleep_for(std::chrono::milliseconds(media.at("sleep_ms").get<int>()));
  }
  if (media.value("fail", false)) throw std::runtime_error("fixture requested failure");
}

json speech_probe(const json& req) {
  const auto media = read_json(req.at("audio_path").get<std::string>());
  honour_directives(media);
  json env = json::array();
  for (const auto& run : media.at("envelope")) {
    const auto ms = run.at(0).get<std::int64_t>();
    for (std::int64_t i = 0; i < ms; ++i) env.push_back(run.at(1).get<double>());
  }
  return {{"envelope_ms", env}};
}

json speech(const json& req) {
  const auto media = read_json(req.at("audio_path").get<std::string>());
  honour_directives(media);
  const auto& transcripts = media.at("transcripts");
  json out = json::array();
  for (std::size_t i = 0; i < req.at("chunks").size(); ++i) {
    out.push_back(i < transcripts.size() ? transcripts.at(i).get<std::string>() : std::string());
  }
  return {{"transcripts", out}};
}

json situation_probe(const json& req) {
  const auto media = read_json(req.at("video_path").get<std::string>());
  honour_directives(media);
  return {{"total_frames", media.at("total_frames")}};
}

json situation(const json& req) {
  const auto media = read_json(req.at("video_path").get<std::string>());
  honour_directives(media);
  std::map<std::int64_t, json> scenes;
  const json fixture_scenes = media.value("scenes", json::object());
  for (const auto& [start, candidates] : fixture_scenes.items()) {
    scenes.emplace(std::stoll(start), candidates);
  }
  json frames = json::array();
  for (const auto& f : req.at("frame_indices")) {
    const auto index = f.get<std::int64_t>();
    auto it = scenes.upper_bound(index);
    if (it == scenes.begin()) continue;
    json frame = json::object();
    frame["index"] = index;
    frame["candidates"] = std::prev(it)->second;
    frames.push_back(std::move(frame));
  }
  return {{"frames", frames}};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 4) {
    std::cerr << "usage: " << argv[0] << " <mode> <request.json> <response.json>\n";
    return 2;
  }
  try {
    const std::string mode = argv[1];
    const auto req = read_json(argv[2]);
    json resp;
    if (mode == "speech-probe") {
      resp = speech_probe(req);
    } else if (mode == "speech") {
      resp = speech(req);
    } else if (mode == "situation-probe") {
      resp = situation_probe(req);
    } else if (mode == "situation") {
      resp = situation(req);
    } else {
      std::cerr << "unknown mode " << mode << "\n";
      return 2;
    }
    std::ofstream out(argv[3]);
    out << resp.dump();
    return out ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "stub plugin: " << e.what() << "\n";
    return 1;
  }
}
