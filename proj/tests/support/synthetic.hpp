#pragma once

// Tiny corpus whose genres are fully determined by keywords: each genre owns
// one keyword and a document contains exactly the keywords of its genres,
// mixed with shared filler tokens.

#include <random>
#include <string>
#include <vector>

#include "genreflow/models.hpp"
#include "genreflow/textprep.hpp"

namespace genreflow::test_support {

struct KeywordCorpus {
  Vocabulary vocab;
  std::size_t max_len = 0;
  std::vector<Sample> samples;
};

inline KeywordCorpus keyword_corpus(std::size_t count, std::uint64_t seed = 7, std::size_t max_len = 12) {
  const std::vector<std::string> keywords = {"blaster", "prank", "kiss", "scream", "starship"};
  const std::vector<std::string> filler = {"city", "night", "road", "house", "friend", "money"};
  std::vector<std::string> vocab_tokens = keywords;
  vocab_tokens.insert(vocab_tokens.end(), filler.begin(), filler.end());

  KeywordCorpus out{Vocabulary(vocab_tokens), max_len, {}};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, filler.size() - 1);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t pattern = i % 31 + 1;  // every nonempty genre subset
    std::string bits;
    TokenList tokens;
    for (std::size_t g = 0; g < kGenreCount; ++g) {
      const bool on = (pattern >> g) & 1;
      bits.push_back(on ? '1' : '0');
      if (on) tokens.push_back(keywords[g]);
      tokens.push_back(filler[pick(rng)]);
    }
    std::shuffle(tokens.begin(), tokens.end(), rng);
    auto encoded = encode_sequence(tokens, out.vocab, max_len);
    out.samples.push_back({"k" + std::to_string(i), to_input(encoded), LabelVector::from_bits(bits)});
  }
  return out;
}

inline ModelConfig keyword_config(const KeywordCorpus& corpus) {
  auto cfg = ModelConfig::ecnet(corpus.vocab.size(), corpus.max_len);
  cfg.epochs = 200;
  cfg.learning_rate = 0.001;
  cfg.seed = 2024;
  return cfg;
}

}  // namespace genreflow::test_support
