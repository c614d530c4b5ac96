#include "genreflow/textprep.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "genreflow/error.hpp"
#include "genreflow/hash.hpp"

namespace genreflow {
namespace {

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_ascii_punct(char c) {
  auto u = static_cast<unsigned char>(c);
  return (u >= 33 && u <= 47) || (u >= 58 && u <= 64) || (u >= 91 && u <= 96) || (u >= 123 && u <= 126);
}

bool is_link(std::string_view token) {
  while (!token.empty() && is_ascii_punct(token.front())) token.remove_prefix(1);
  return token.find("://") != std::string_view::npos || token.starts_with("www.");
}

template <typename Fn>
void for_each_token(std::string_view s, Fn&& fn) {
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_ascii_space(s[i])) ++i;
    std::size_t start = i;
    while (i < s.size() && !is_ascii_space(s[i])) ++i;
    if (i > start) fn(s.substr(start, i - start));
  }
}

}  // namespace

std::string normalize_text(std::string_view raw) {
  std::string lowered(raw);
  for (char& c : lowered) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }

  std::string stripped;
  stripped.reserve(lowered.size());
  for_each_token(lowered, [&](std::string_view token) {
    if (is_link(token)) return;
    for (char c : token) {
      auto u = static_cast<unsigned char>(c);
      bool drop = (c >= '0' && c <= '9') || is_ascii_punct(c) || u < 32 || u == 127;
      stripped.push_back(drop ? ' ' : c);
    }
    stripped.push_back(' ');
  });

  std::string out;
  out.reserve(stripped.size());
  for_each_token(stripped, [&](std::string_view token) {
    if (is_stop_word(token)) return;
    if (!out.empty()) out.push_back(' ');
    out.append(token);
  });
  return out;
}

std::vector<std::string> tokenize(std::string_view normalized) {
  std::vector<std::string> out;
  for_each_token(normalized, [&](std::string_view token) { out.emplace_back(token); });
  return out;
}

Vocabulary::Vocabulary(std::vector<std::string> tokens, std::size_t min_doc_frequency)
    : tokens_(std::move(tokens)), min_doc_frequency_(min_doc_frequency) {
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    const auto& t = tokens_[i];
    if (t.empty() || std::any_of(t.begin(), t.end(), is_ascii_space)) {
      throw Error(ErrorCode::InvalidArgument, "vocabulary token must be nonempty without whitespace");
    }
    if (!index_.emplace(t, static_cast<std::uint32_t>(i + 1)).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate vocabulary token '" + t + "'");
    }
  }
}

std::optional<std::uint32_t> Vocabulary::index_of(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string& Vocabulary::token(std::uint32_t index) const {
  if (index == kPaddingIndex || index > tokens_.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "vocabulary index " + std::to_string(index) + " out of range");
  }
  return tokens_[index - 1];
}

std::string Vocabulary::serialize() const {
  std::string out;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    out += tokens_[i];
    out += '\t';
    out += std::to_string(i + 1);
    out += '\n';
  }
  return out;
}

void Vocabulary::save(std::ostream& out) const { out << serialize(); }

Vocabulary Vocabulary::load(std::istream& in) {
  std::vector<std::string> tokens;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::MalformedFile, "vocabulary line " + std::to_string(line_no) + " has no tab");
    }
    std::uint32_t index = 0;
    const char* first = line.data() + tab + 1;
    const char* last = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(first, last, index);
    if (ec != std::errc{} || ptr != last || index != tokens.size() + 1) {
      throw Error(ErrorCode::MalformedFile,
                  "vocabulary line " + std::to_string(line_no) + ": indices must be contiguous from 1");
    }
    tokens.push_back(line.substr(0, tab));
  }
  try {
    return Vocabulary(std::move(tokens));
  } catch (const Error& e) {
    throw Error(ErrorCode::MalformedFile, e.what());
  }
}

std::string Vocabulary::hash() const { return sha256_hex(serialize()); }

Vocabulary build_vocabulary(std::span<const TokenList> documents, std::size_t min_doc_frequency) {
  if (documents.empty()) throw Error(ErrorCode::EmptyCorpus, "cannot build a vocabulary from zero documents");
  if (min_doc_frequency == 0) throw Error(ErrorCode::InvalidArgument, "min_doc_frequency must be >= 1");

  struct Counts {
    std::size_t total = 0;
    std::size_t docs = 0;
  };
  std::map<std::string, Counts> counts;
  for (const auto& doc : documents) {
    std::set<std::string_view> seen;
    for (const auto& token : doc) {
      auto& c = counts[token];
      ++c.total;
      if (seen.insert(token).second) ++c.docs;
    }
  }

  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [token, c] : counts) {
    if (c.docs >= min_doc_frequency) kept.emplace_back(token, c.total);
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  std::vector<std::string> tokens;
  tokens.reserve(kept.size());
  for (auto& [token, total] : kept) tokens.push_back(std::move(token));
  return Vocabulary(std::move(tokens), min_doc_frequency);
}

EncodedSequence encode_sequence(std::span<const std::string> tokens, const Vocabulary& vocab,
                                std::size_t max_len) {
  if (max_len == 0) throw Error(ErrorCode::InvalidArgument, "max_len must be >= 1");
  EncodedSequence out;
  out.indices.assign(max_len, Vocabulary::kPaddingIndex);
  for (const auto& token : tokens) {
    if (out.true_length == max_len) break;
    if (auto idx = vocab.index_of(token)) out.indices[out.true_length++] = *idx;
  }
  return out;
}

}  // namespace genreflow
