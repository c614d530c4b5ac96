#include "genreflow/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <unordered_map>

#include "genreflow/csv.hpp"
#include "genreflow/error.hpp"

namespace genreflow {
namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t bar = s.find('|', start);
    if (bar == std::string_view::npos) bar = s.size();
    std::string item = trim(s.substr(start, bar - start));
    if (!item.empty()) out.push_back(std::move(item));
    start = bar + 1;
  }
  return out;
}

std::string join_list(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += '|';
    out += items[i];
  }
  return out;
}

std::optional<std::filesystem::path> optional_path(const std::string& s) {
  std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  return std::filesystem::path(t);
}

}  // namespace

LabelVector TrailerRecord::labels() const {
  LabelVector out;
  for (Genre g : genres) out.set(g);
  return out;
}

std::vector<TrailerRecord> parse_manifest(std::istream& in, const std::string& source) {
  auto rows = csv::read(in);
  if (rows.empty()) throw Error(ErrorCode::MissingColumn, source + ": missing header row");

  const auto& header = rows.front();
  std::unordered_map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::string name = trim(header[i]);
    if (std::find(kManifestColumns.begin(), kManifestColumns.end(), name) == kManifestColumns.end()) {
      throw Error(ErrorCode::MissingColumn, source + ": unexpected column '" + name + "'");
    }
    if (!column.emplace(name, i).second) {
      throw Error(ErrorCode::MissingColumn, source + ": duplicate column '" + name + "'");
    }
  }
  for (auto name : kManifestColumns) {
    if (!column.count(std::string(name))) {
      throw Error(ErrorCode::MissingColumn, source + ": missing column '" + std::string(name) + "'");
    }
  }

  std::vector<TrailerRecord> records;
  std::set<std::string> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = source + " row " + std::to_string(r + 1);
    if (row.size() != header.size()) {
      throw Error(ErrorCode::InvalidRecord, where + ": expected " + std::to_string(header.size()) +
                                                " fields, got " + std::to_string(row.size()));
    }
    auto field = [&](std::string_view name) -> const std::string& {
      return row[column.at(std::string(name))];
    };

    TrailerRecord rec;
    rec.id = trim(field("id"));
    if (rec.id.empty()) throw Error(ErrorCode::InvalidRecord, where + ": empty id");
    if (!seen.insert(rec.id).second) throw Error(ErrorCode::DuplicateId, where + ": duplicate id '" + rec.id + "'");
    rec.title = trim(field("title"));
    rec.video_path = optional_path(field("video_path"));
    rec.audio_path = optional_path(field("audio_path"));
    rec.description = trim(field("description"));
    rec.plot = trim(field("plot"));
    rec.keywords = split_list(field("keywords"));

    LabelVector labels;
    for (const auto& name : split_list(field("genres"))) {
      auto g = parse_genre(name);
      if (!g) throw Error(ErrorCode::UnknownGenre, where + ": unknown genre '" + name + "'");
      labels.set(*g);
    }
    if (!labels.any()) throw Error(ErrorCode::InvalidRecord, where + ": no genres for '" + rec.id + "'");
    rec.genres = labels.genres();
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<TrailerRecord> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open manifest " + path.string());
  return parse_manifest(in, path.string());
}

void write_manifest(std::ostream& out, std::span<const TrailerRecord> records) {
  csv::Row header(kManifestColumns.begin(), kManifestColumns.end());
  csv::write_row(out, header);
  for (const auto& rec : records) {
    std::vector<std::string> genres;
    for (Genre g : rec.genres) genres.emplace_back(genre_name(g));
    csv::write_row(out, {rec.id, rec.title, rec.video_path ? rec.video_path->string() : "",
                         rec.audio_path ? rec.audio_path->string() : "", rec.description, rec.plot,
                         join_list(rec.keywords), join_list(genres)});
  }
}

SplitIndices split_indices(std::size_t n, double eval_fraction, std::uint64_t seed,
                           std::span<const std::string> strata) {
  if (!(eval_fraction > 0.0 && eval_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "eval fraction must lie in (0,1)");
  }
  if (!strata.empty() && strata.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "strata size does not match item count");
  }
  const auto n_eval = static_cast<std::size_t>(std::llround(eval_fraction * static_cast<double>(n)));
  std::mt19937_64 rng(seed);
  std::vector<char> is_eval(n, 0);

  if (strata.empty()) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 0; i < n_eval; ++i) is_eval[order[i]] = 1;
  } else {
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i) groups[strata[i]].push_back(i);

    struct Quota {
      std::vector<std::size_t>* members;
      std::size_t take;
      double remainder;
    };
    std::vector<Quota> quotas;
    std::size_t assigned = 0;
    for (auto& [key, members] : groups) {
      std::shuffle(members.begin(), members.end(), rng);
      double exact = eval_fraction * static_cast<double>(members.size());
      auto take = static_cast<std::size_t>(std::floor(exact));
      quotas.push_back({&members, take, exact - static_cast<double>(take)});
      assigned += take;
    }
    std::vector<std::size_t> by_remainder(quotas.size());
    std::iota(by_remainder.begin(), by_remainder.end(), 0);
    std::stable_sort(by_remainder.begin(), by_remainder.end(),
                     [&](std::size_t a, std::size_t b) { return quotas[a].remainder > quotas[b].remainder; });
    for (std::size_t k = 0; assigned < n_eval && k < by_remainder.size(); ++k) {
      auto& q = quotas[by_remainder[k]];
      if (q.take < q.members->size()) {
        ++q.take;
        ++assigned;
      }
    }
    for (const auto& q : quotas) {
      for (std::size_t i = 0; i < q.take; ++i) is_eval[(*q.members)[i]] = 1;
    }
  }

  SplitIndices out;
  for (std::size_t i = 0; i < n; ++i) (is_eval[i] ? out.eval : out.train).push_back(i);
  return out;
}

DatasetSplit split_dataset(std::span<const TrailerRecord> records, double eval_fraction,
                           std::uint64_t seed, bool stratified) {
  if (records.size() < 2) throw Error(ErrorCode::EmptyInput, "split needs at least 2 records");
  std::vector<std::string> strata;
  if (stratified) {
    for (const auto& r : records) strata.push_back(r.labels().to_bits());
  }
  auto idx = split_indices(records.size(), eval_fraction, seed, strata);
  DatasetSplit split;
  split.seed = seed;
  for (auto i : idx.train) split.train.push_back(records[i]);
  for (auto i : idx.eval) split.eval.push_back(records[i]);
  return split;
}

}  // namespace genreflow
