#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace genreflow {

/// Version tag of the bundled English stop-word list.
std::string_view stop_words_version() noexcept;
std::span<const std::string_view> stop_words() noexcept;
bool is_stop_word(std::string_view token) noexcept;

/// Lowercases, drops web links, replaces digits and ASCII punctuation with
/// spaces, removes stop-words and collapses whitespace. Idempotent.
std::string normalize_text(std::string_view raw);

/// Whitespace split; never yields empty tokens.
std::vector<std::string> tokenize(std::string_view normalized);

using TokenList = std::vector<std::string>;

/// Token -> index map. Index 0 is padding and belongs to no token; tokens
/// occupy 1..size() contiguously.
class Vocabulary {
 public:
  static constexpr std::uint32_t kPaddingIndex = 0;

  Vocabulary() = default;
  /// `tokens[i]` receives index i + 1. Throws InvalidArgument on duplicates
  /// or tokens that contain whitespace.
  explicit Vocabulary(std::vector<std::string> tokens, std::size_t min_doc_frequency = 0);

  std::size_t size() const noexcept { return tokens_.size(); }
  std::size_t min_doc_frequency() const noexcept { return min_doc_frequency_; }
  std::optional<std::uint32_t> index_of(std::string_view token) const;
  /// Token for index in 1..size(); throws IndexOutOfRange otherwise.
  const std::string& token(std::uint32_t index) const;

  /// `token<TAB>index` lines sorted by index.
  std::string serialize() const;
  void save(std::ostream& out) const;
  static Vocabulary load(std::istream& in);
  std::string hash() const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::size_t min_doc_frequency_ = 0;
};

/// Keeps tokens with document frequency >= min_doc_frequency, ordered by
/// descending total occurrences then lexicographically. Errors: EmptyCorpus
/// (no documents), InvalidArgument (min_doc_frequency == 0).
Vocabulary build_vocabulary(std::span<const TokenList> documents, std::size_t min_doc_frequency = 2);

struct EncodedSequence {
  std::vector<std::uint32_t> indices;  // length max_len, zero-padded on the right
  std::size_t true_length = 0;
};

/// Drops out-of-vocabulary tokens, keeps the head when longer than max_len.
EncodedSequence encode_sequence(std::span<const std::string> tokens, const Vocabulary& vocab,
                                std::size_t max_len);

}  // namespace genreflow
