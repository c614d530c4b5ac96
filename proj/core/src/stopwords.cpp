#include <algorithm>
#include <iterator>
#include <span>
#include <string_view>
#include <vector>

#include "genreflow/textprep.hpp"

namespace genreflow {
namespace {

// English stop-words, apostrophe-free form: punctuation becomes whitespace
// before filtering, so "don't" arrives as "don" + "t". Sorted for lookup.
constexpr std::string_view kStopWords[] = {
    "a",          "about",    "above",   "after",   "again",      "against",  "ain",
    "all",        "am",       "an",      "and",     "any",        "are",      "aren",
    "as",         "at",       "be",      "because", "been",       "before",   "being",
    "below",      "between",  "both",    "but",     "by",         "can",      "couldn",
    "d",          "did",      "didn",    "do",      "does",       "doesn",    "doing",
    "don",        "down",     "during",  "each",    "few",        "for",      "from",
    "further",    "had",      "hadn",    "has",     "hasn",       "have",     "haven",
    "having",     "he",       "her",     "here",    "hers",       "herself",  "him",
    "himself",    "his",      "how",     "i",       "if",         "in",       "into",
    "is",         "isn",      "it",      "its",     "itself",     "just",     "ll",
    "m",          "ma",       "me",      "mightn",  "more",       "most",     "mustn",
    "my",         "myself",   "needn",   "no",      "nor",        "not",      "now",
    "o",          "of",       "off",     "on",      "once",       "only",     "or",
    "other",      "our",      "ours",    "ourselves", "out",      "over",     "own",
    "re",         "s",        "same",    "shan",    "she",        "should",   "shouldn",
    "so",         "some",     "such",    "t",       "than",       "that",     "the",
    "their",      "theirs",   "them",    "themselves", "then",    "there",    "these",
    "they",       "this",     "those",   "through", "to",         "too",      "under",
    "until",      "up",       "ve",      "very",    "was",        "wasn",     "we",
    "were",       "weren",    "what",    "when",    "where",      "which",    "while",
    "who",        "whom",     "why",     "will",    "with",       "won",      "wouldn",
    "y",          "you",      "your",    "yours",   "yourself",   "yourselves",
};

}  // namespace

std::string_view stop_words_version() noexcept { return "en-153-v1"; }

std::span<const std::string_view> stop_words() noexcept { return kStopWords; }

bool is_stop_word(std::string_view token) noexcept {
  static const auto sorted = [] {
    std::vector<std::string_view> copy(std::begin(kStopWords), std::end(kStopWords));
    std::sort(copy.begin(), copy.end());
    return copy;
  }();
  return std::binary_search(sorted.begin(), sorted.end(), token);
}

}  // namespace genreflow
