#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace genreflow {

/// Contiguous 1-, 2- and 3-grams (tokens joined by one space) with counts.
std::map<std::string, std::size_t> extract_ngrams(std::span<const std::string> tokens);

struct SparseVector {
  std::size_t dimension = 0;
  std::vector<std::pair<std::uint32_t, double>> entries;  // strictly increasing index

  double norm() const noexcept;
  std::vector<double> to_dense() const;
};

/// Fitted n-gram vocabulary with smoothed idf = ln((1 + N) / (1 + df)) + 1.
class TfidfModel {
 public:
  TfidfModel() = default;

  std::size_t size() const noexcept { return ngrams_.size(); }
  std::size_t document_count() const noexcept { return documents_; }
  std::size_t min_doc_frequency() const noexcept { return min_doc_frequency_; }
  std::optional<std::size_t> max_features() const noexcept { return max_features_; }

  const std::string& ngram(std::size_t index) const { return ngrams_.at(index); }
  double idf(std::size_t index) const { return idf_.at(index); }
  std::optional<std::uint32_t> index_of(std::string_view ngram) const;

  /// count * idf per n-gram, then L2-normalized. Unseen n-grams are ignored.
  SparseVector transform(std::span<const std::string> tokens) const;

  /// Header line then `ngram<TAB>index<TAB>idf` lines.
  std::string serialize() const;
  void save(std::ostream& out) const;
  /// Errors: MalformedFile.
  static TfidfModel load(std::istream& in);
  std::string hash() const;

  friend TfidfModel fit_tfidf(std::span<const std::vector<std::string>> documents, std::size_t min_doc_frequency,
                              std::optional<std::size_t> max_features);

 private:
  void rebuild_index();

  std::vector<std::string> ngrams_;
  std::vector<double> idf_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::size_t documents_ = 0;
  std::size_t min_doc_frequency_ = 1;
  std::optional<std::size_t> max_features_;
};

inline constexpr std::size_t kDefaultTfidfMinDf = 2;
inline constexpr std::size_t kDefaultTfidfMaxFeatures = 40000;

/// Keeps n-grams with df >= min_doc_frequency, then the max_features highest
/// df (ties lexicographic); that order is also the index order.
/// Errors: EmptyCorpus, InvalidArgument (min_doc_frequency == 0).
TfidfModel fit_tfidf(std::span<const std::vector<std::string>> documents,
                     std::size_t min_doc_frequency = kDefaultTfidfMinDf,
                     std::optional<std::size_t> max_features = kDefaultTfidfMaxFeatures);

}  // namespace genreflow
