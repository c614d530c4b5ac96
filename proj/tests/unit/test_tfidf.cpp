#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "genreflow/error.hpp"
#include "genreflow/tfidf.hpp"
#include "oracles/tfidf_oracle.hpp"

using namespace genreflow;

namespace {

using Doc = std::vector<std::string>;

ErrorCode error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvalidArgument;
}

std::vector<Doc> random_docs(std::mt19937_64& rng, std::size_t count) {
  static const std::vector<std::string> words = {"alien", "war", "love", "ghost", "laugh", "ship", "night"};
  std::uniform_int_distribution<std::size_t> len(0, 8), pick(0, words.size() - 1);
  std::vector<Doc> docs(count);
  for (auto& d : docs) {
    const auto n = len(rng);
    for (std::size_t i = 0; i < n; ++i) d.push_back(words[pick(rng)]);
  }
  return docs;
}

}  // namespace

TEST(Ngrams, ContiguousUpToTrigrams) {
  Doc abc = {"a", "b", "c"};
  const std::map<std::string, std::size_t> expected = {{"a", 1}, {"b", 1}, {"c", 1}, {"a b", 1}, {"b c", 1}, {"a b c", 1}};
  EXPECT_EQ(extract_ngrams(abc), expected);
  Doc aa = {"a", "a"};
  EXPECT_EQ(extract_ngrams(aa), (std::map<std::string, std::size_t>{{"a", 2}, {"a a", 1}}));
  EXPECT_TRUE(extract_ngrams(Doc{}).empty());
}

TEST(Tfidf, SmoothedIdfClosedForm) {
  std::vector<Doc> docs = {{"a", "b"}, {"a"}};
  auto m = fit_tfidf(docs, 1, std::nullopt);
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(m.ngram(0), "a");
  EXPECT_DOUBLE_EQ(m.idf(0), 1.0);
  EXPECT_NEAR(m.idf(*m.index_of("b")), std::log(1.5) + 1.0, 1e-15);
  EXPECT_NEAR(m.idf(*m.index_of("b")), 1.405465, 1e-6);
  EXPECT_EQ(m.document_count(), 2u);

  auto pruned = fit_tfidf(docs, 2, std::nullopt);
  ASSERT_EQ(pruned.size(), 1u);
  EXPECT_EQ(pruned.ngram(0), "a");
  auto top = fit_tfidf(docs, 1, 1);
  ASSERT_EQ(top.size(), 1u);
  EXPECT_EQ(top.ngram(0), "a");
}

TEST(Tfidf, TransformExamples) {
  std::vector<Doc> docs = {{"a", "b"}, {"a"}};
  auto m = fit_tfidf(docs, 1, std::nullopt);
  auto single = m.transform(Doc{"a"});
  ASSERT_EQ(single.entries.size(), 1u);
  EXPECT_DOUBLE_EQ(single.entries[0].second, 1.0);
  EXPECT_TRUE(m.transform(Doc{}).entries.empty());
  EXPECT_EQ(m.transform(Doc{"zzz"}).norm(), 0.0);

  auto ab = m.transform(Doc{"a", "b"});
  const double ib = std::log(1.5) + 1.0;
  const double n = std::sqrt(1.0 + 2 * ib * ib);
  const auto dense = ab.to_dense();
  EXPECT_NEAR(dense[*m.index_of("a")], 1.0 / n, 1e-15);
  EXPECT_NEAR(dense[*m.index_of("b")], ib / n, 1e-15);
  EXPECT_NEAR(dense[*m.index_of("a b")], ib / n, 1e-15);
  for (std::size_t i = 1; i < ab.entries.size(); ++i) EXPECT_LT(ab.entries[i - 1].first, ab.entries[i].first);
}

TEST(Tfidf, Errors) {
  EXPECT_EQ(error_of([] { fit_tfidf(std::vector<Doc>{}, 1, std::nullopt); }), ErrorCode::EmptyCorpus);
  std::vector<Doc> docs = {{"a"}};
  EXPECT_EQ(error_of([&] { fit_tfidf(docs, 0, std::nullopt); }), ErrorCode::InvalidArgument);
}

TEST(Tfidf, MatchesBruteForceReference) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const auto docs = random_docs(rng, 1 + rng() % 20);
    const std::size_t min_df = 1 + rng() % 3;
    const std::optional<std::size_t> max_features =
        (rng() & 1) ? std::optional<std::size_t>(1 + rng() % 15) : std::nullopt;
    if (std::all_of(docs.begin(), docs.end(), [](const Doc& d) { return d.empty(); })) continue;
    const auto model = fit_tfidf(docs, min_df, max_features);
    const auto ref = oracle::naive_fit(docs, min_df, max_features);
    ASSERT_EQ(model.size(), ref.grams.size());
    for (std::size_t i = 0; i < ref.grams.size(); ++i) {
      EXPECT_EQ(model.ngram(i), ref.grams[i]);
      EXPECT_EQ(model.idf(i), ref.idf[i]);
    }
    for (const auto& doc : random_docs(rng, 5)) {
      const auto got = model.transform(doc).to_dense();
      const auto want = ref.transform(doc);
      ASSERT_EQ(got.size(), want.size());
      for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
    }
  }
}

TEST(Tfidf, NormIsZeroOrOne) {
  std::mt19937_64 rng(5);
  const auto docs = random_docs(rng, 20);
  const auto model = fit_tfidf(docs, 1, std::nullopt);
  for (const auto& doc : random_docs(rng, 200)) {
    const double n = model.transform(doc).norm();
    EXPECT_TRUE(n == 0.0 || std::abs(n - 1.0) < 1e-12) << n;
  }
}

TEST(Tfidf, FitIgnoresDocumentOrder) {
  std::mt19937_64 rng(17);
  auto docs = random_docs(rng, 15);
  const auto base = fit_tfidf(docs, 2, 10).serialize();
  for (int i = 0; i < 10; ++i) {
    std::shuffle(docs.begin(), docs.end(), rng);
    EXPECT_EQ(fit_tfidf(docs, 2, 10).serialize(), base);
  }
}

TEST(Tfidf, SerializationRoundTrip) {
  std::mt19937_64 rng(23);
  const auto docs = random_docs(rng, 12);
  const auto model = fit_tfidf(docs, 1, 25);
  std::stringstream buf;
  model.save(buf);
  const auto loaded = TfidfModel::load(buf);
  EXPECT_EQ(loaded.serialize(), model.serialize());
  EXPECT_EQ(loaded.hash(), model.hash());
  EXPECT_EQ(loaded.max_features(), model.max_features());
  for (std::size_t i = 0; i < model.size(); ++i) EXPECT_EQ(loaded.idf(i), model.idf(i));
  const Doc probe = {"alien", "war", "love"};
  EXPECT_EQ(loaded.transform(probe).entries, model.transform(probe).entries);

  EXPECT_NE(fit_tfidf(docs, 1, 24).hash(), model.hash());
  std::istringstream junk("not a model\n");
  EXPECT_EQ(error_of([&] { TfidfModel::load(junk); }), ErrorCode::MalformedFile);
}
