#include "genreflow/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <nlohmann/json.hpp>
#include <ostream>

#include "genreflow/error.hpp"

namespace genreflow {
namespace {

using nlohmann::json;

constexpr std::array<char, 8> kMagic{'G', 'F', 'L', 'O', 'W', 'C', 'K', 'P'};

static_assert(std::numeric_limits<float>::is_iec559);

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

[[noreturn]] void corrupt(const std::string& what) { throw Error(ErrorCode::CorruptCheckpoint, what); }

void read_exact(std::istream& in, char* dst, std::size_t n, const char* what) {
  in.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) corrupt(std::string("truncated while reading ") + what);
}

template <typename T>
T get_le(std::istream& in, const char* what) {
  std::array<unsigned char, sizeof(T)> bytes{};
  read_exact(in, reinterpret_cast<char*>(bytes.data()), bytes.size(), what);
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(static_cast<T>(bytes[i]) << (8 * i));
  return value;
}

json history_json(const std::vector<EpochRecord>& history) {
  json arr = json::array();
  for (const auto& r : history) {
    json e = {{"epoch", r.epoch}, {"train_loss", r.train_loss}, {"train_subset_accuracy", r.train_subset_accuracy}};
    e["eval_loss"] = r.eval_loss ? json(*r.eval_loss) : json(nullptr);
    arr.push_back(std::move(e));
  }
  return arr;
}

std::vector<EpochRecord> history_from(const json& arr) {
  std::vector<EpochRecord> out;
  for (const auto& e : arr) {
    EpochRecord r;
    e.at("epoch").get_to(r.epoch);
    e.at("train_loss").get_to(r.train_loss);
    e.at("train_subset_accuracy").get_to(r.train_subset_accuracy);
    if (!e.at("eval_loss").is_null()) r.eval_loss = e.at("eval_loss").get<double>();
    out.push_back(r);
  }
  return out;
}

struct Named {
  std::string name;
  nn::Parameter* param;
};

// Parameters qualified by their layer name, e.g. "conv1d/kernel".
std::vector<Named> named_parameters(nn::Network& network) {
  std::vector<Named> out;
  for (std::size_t i = 0; i < network.layer_count(); ++i) {
    auto& layer = network.layer(i);
    for (auto& p : layer.parameters()) out.push_back({layer.name() + "/" + p.name, &p});
  }
  return out;
}

}  // namespace

void save_checkpoint(const TrainedModel& model, std::ostream& out) {
  json header = {{"config", json::parse(model.config.to_json())},
                 {"feature_hash", model.feature_hash},
                 {"history", history_json(model.history)}};
  const std::string text = header.dump();

  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint16_t>(out, kCheckpointVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));

  const auto params = named_parameters(const_cast<nn::Network&>(model.network));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& [name, p] : params) {
    put_le<std::uint16_t>(out, static_cast<std::uint16_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(p->value.rows()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(p->value.cols()));
    for (double v : p->value.values()) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  if (!out) throw Error(ErrorCode::IoError, "failed to write checkpoint");
}

void save_checkpoint(const TrainedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  save_checkpoint(model, out);
  out.close();
  if (!out) throw Error(ErrorCode::IoError, "failed to write '" + path.string() + "'");
}

TrainedModel load_checkpoint(std::istream& in) {
  std::array<char, 8> magic{};
  read_exact(in, magic.data(), magic.size(), "magic");
  if (magic != kMagic) corrupt("not a genreflow checkpoint");
  const auto version = get_le<std::uint16_t>(in, "version");
  if (version > kCheckpointVersion) {
    throw Error(ErrorCode::VersionMismatch, "checkpoint format version " + std::to_string(version) +
                                                " is newer than supported version " +
                                                std::to_string(kCheckpointVersion));
  }
  if (version == 0) corrupt("invalid format version 0");

  const auto header_len = get_le<std::uint32_t>(in, "header length");
  std::string text(header_len, '\0');
  read_exact(in, text.data(), text.size(), "header");

  ModelConfig config;
  std::string feature_hash;
  std::vector<EpochRecord> history;
  try {
    const json header = json::parse(text);
    config = ModelConfig::from_json(header.at("config").dump());
    header.at("feature_hash").get_to(feature_hash);
    history = history_from(header.at("history"));
  } catch (const json::exception& e) {
    corrupt(std::string("bad header: ") + e.what());
  } catch (const Error& e) {
    corrupt(std::string("bad header: ") + e.what());
  }

  nn::Network network = [&] {
    try {
      return build_network(config);
    } catch (const Error& e) {
      corrupt(std::string("stored config does not build: ") + e.what());
    }
  }();

  auto params = named_parameters(network);
  const auto count = get_le<std::uint32_t>(in, "tensor count");
  if (count != params.size()) {
    corrupt("checkpoint has " + std::to_string(count) + " tensors, model expects " + std::to_string(params.size()));
  }
  for (auto& [expected, p] : params) {
    const auto name_len = get_le<std::uint16_t>(in, "tensor name length");
    std::string name(name_len, '\0');
    read_exact(in, name.data(), name.size(), "tensor name");
    const auto rows = get_le<std::uint32_t>(in, "tensor rows");
    const auto cols = get_le<std::uint32_t>(in, "tensor cols");
    if (name != expected || rows != p->value.rows() || cols != p->value.cols()) {
      corrupt("tensor '" + name + "' " + std::to_string(rows) + "x" + std::to_string(cols) + " does not match '" +
              expected + "' " + std::to_string(p->value.rows()) + "x" + std::to_string(p->value.cols()));
    }
    for (double& v : p->value.values()) {
      v = static_cast<double>(std::bit_cast<float>(get_le<std::uint32_t>(in, "tensor data")));
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) corrupt("trailing bytes after the last tensor");
  network.mark_updated();
  return TrainedModel{std::move(config), std::move(network), std::move(feature_hash), std::move(history)};
}

TrainedModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open checkpoint '" + path.string() + "'");
  return load_checkpoint(in);
}

}  // namespace genreflow
