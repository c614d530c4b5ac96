#include "genreflow/tfidf.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "genreflow/error.hpp"
#include "genreflow/hash.hpp"

namespace genreflow {
namespace {

constexpr std::string_view kHeaderTag = "#genreflow-tfidf";

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

std::string_view value_of(std::string_view field, std::string_view key) {
  if (field.size() <= key.size() || field.substr(0, key.size()) != key || field[key.size()] != '=') {
    throw Error(ErrorCode::MalformedFile, "tfidf header lacks '" + std::string(key) + "'");
  }
  return field.substr(key.size() + 1);
}

}  // namespace

std::map<std::string, std::size_t> extract_ngrams(std::span<const std::string> tokens) {
  std::map<std::string, std::size_t> out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::string gram = tokens[i];
    ++out[gram];
    for (std::size_t n = 2; n <= 3 && i + n <= tokens.size(); ++n) {
      gram += ' ';
      gram += tokens[i + n - 1];
      ++out[gram];
    }
  }
  return out;
}

double SparseVector::norm() const noexcept {
  double sq = 0.0;
  for (const auto& [i, v] : entries) sq += v * v;
  return std::sqrt(sq);
}

std::vector<double> SparseVector::to_dense() const {
  std::vector<double> out(dimension, 0.0);
  for (const auto& [i, v] : entries) out[i] = v;
  return out;
}

std::optional<std::uint32_t> TfidfModel::index_of(std::string_view ngram) const {
  auto it = index_.find(std::string(ngram));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

SparseVector TfidfModel::transform(std::span<const std::string> tokens) const {
  SparseVector out;
  out.dimension = ngrams_.size();
  for (const auto& [gram, count] : extract_ngrams(tokens)) {
    auto it = index_.find(gram);
    if (it == index_.end()) continue;
    out.entries.emplace_back(it->second, static_cast<double>(count) * idf_[it->second]);
  }
  std::sort(out.entries.begin(), out.entries.end());
  double sq = 0.0;
  for (const auto& [i, v] : out.entries) sq += v * v;
  if (sq > 0.0) {
    const double norm = std::sqrt(sq);
    for (auto& [i, v] : out.entries) v /= norm;
  }
  return out;
}

std::string TfidfModel::serialize() const {
  std::string out(kHeaderTag);
  out += "\tversion=1\tdocuments=" + std::to_string(documents_) + "\tmin_df=" + std::to_string(min_doc_frequency_) +
         "\tmax_features=" + (max_features_ ? std::to_string(*max_features_) : std::string("none")) + "\n";
  for (std::size_t i = 0; i < ngrams_.size(); ++i) {
    out += ngrams_[i];
    out += '\t';
    out += std::to_string(i);
    out += '\t';
    out += format_double(idf_[i]);
    out += '\n';
  }
  return out;
}

void TfidfModel::save(std::ostream& out) const { out << serialize(); }

TfidfModel TfidfModel::load(std::istream& in) {
  TfidfModel model;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::MalformedFile, "empty tfidf model file");
  auto header = split_tabs(line);
  if (header.size() != 5 || header[0] != kHeaderTag || header[1] != "version=1") {
    throw Error(ErrorCode::MalformedFile, "unrecognized tfidf model header");
  }
  if (!parse_number(value_of(header[2], "documents"), model.documents_) ||
      !parse_number(value_of(header[3], "min_df"), model.min_doc_frequency_)) {
    throw Error(ErrorCode::MalformedFile, "bad tfidf header numbers");
  }
  auto mf = value_of(header[4], "max_features");
  if (mf != "none") {
    std::size_t v = 0;
    if (!parse_number(mf, v)) throw Error(ErrorCode::MalformedFile, "bad max_features");
    model.max_features_ = v;
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto f = split_tabs(line);
    std::size_t index = 0;
    if (f.size() != 3 || !parse_number(f[1], index) || index != model.ngrams_.size()) {
      throw Error(ErrorCode::MalformedFile, "tfidf line " + std::to_string(line_no) + " is malformed");
    }
    double idf = std::strtod(std::string(f[2]).c_str(), nullptr);
    if (!(idf > 0.0) || !std::isfinite(idf)) {
      throw Error(ErrorCode::MalformedFile, "tfidf line " + std::to_string(line_no) + " has a non-positive idf");
    }
    model.ngrams_.emplace_back(f[0]);
    model.idf_.push_back(idf);
  }
  model.rebuild_index();
  if (model.index_.size() != model.ngrams_.size()) throw Error(ErrorCode::MalformedFile, "duplicate n-gram in tfidf model");
  return model;
}

std::string TfidfModel::hash() const { return sha256_hex(serialize()); }

void TfidfModel::rebuild_index() {
  index_.clear();
  index_.reserve(ngrams_.size());
  for (std::size_t i = 0; i < ngrams_.size(); ++i) index_.emplace(ngrams_[i], static_cast<std::uint32_t>(i));
}

TfidfModel fit_tfidf(std::span<const std::vector<std::string>> documents, std::size_t min_doc_frequency,
                     std::optional<std::size_t> max_features) {
  if (documents.empty()) throw Error(ErrorCode::EmptyCorpus, "cannot fit TF-IDF on zero documents");
  if (min_doc_frequency == 0) throw Error(ErrorCode::InvalidArgument, "min_doc_frequency must be >= 1");

  std::map<std::string, std::size_t> df;
  for (const auto& doc : documents) {
    for (const auto& [gram, count] : extract_ngrams(doc)) ++df[gram];
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [gram, d] : df) {
    if (d >= min_doc_frequency) kept.emplace_back(gram, d);
  }
  // map iteration is lexicographic, so a stable sort on df keeps ties in order
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (max_features && kept.size() > *max_features) kept.resize(*max_features);

  TfidfModel model;
  model.documents_ = documents.size();
  model.min_doc_frequency_ = min_doc_frequency;
  model.max_features_ = max_features;
  const double n = static_cast<double>(documents.size());
  for (auto& [gram, d] : kept) {
    model.ngrams_.push_back(std::move(gram));
    model.idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(d))) + 1.0);
  }
  model.rebuild_index();
  return model;
}

}  // namespace genreflow
