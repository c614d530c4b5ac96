// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "genreflow/checkpoint.hpp"
#include "genreflow/cli.hpp"
#include "genreflow/corpus.hpp"
#include "genreflow/csv.hpp"
#include "genreflow/metrics.hpp"
#include "genreflow/models.hpp"
#include "genreflow/nn/layers.hpp"
#include "genreflow/nn/loss.hpp"
#include "genreflow/tfidf.hpp"
#include "oracles/ap_oracle.hpp"
#include "oracles/finite_diff.hpp"
#include "oracles/tfidf_oracle.hpp"
#include "support/bools.hpp"
#include "support/synthetic.hpp"
#include "support/test_support.hpp"

using namespace genreflow;
using namespace genreflow::nn;
namespace fs = std::filesystem;

namespace {

// Pinned limits.
constexpr double kCountsSeconds = 1.0;
constexpr double kGradSeconds = 60.0;
constexpr double kGradTolerance = 1e-4;
constexpr int kGradConfigurations = 100;
constexpr double kOverfitSeconds = 120.0;
constexpr double kOverfitLoss = 0.05;
constexpr double kPrevalenceTolerance = 1e-12;
constexpr double kSmokeSeconds = 180.0;

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& why) {
    if (!ok && pass) {
      pass = false;
      detail = why;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::vector<std::size_t> counts(const Network& net) {
  std::vector<std::size_t> out;
  for (const auto& row : net.summary()) out.push_back(row.parameters);
  return out;
}

Outcome parameter_counts() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const auto ecnet = build_ecnet(10395, 330);
  const auto tfanet = build_tfanet(34684);
  const double took = seconds_since(start);
  o.require(counts(ecnet) == std::vector<std::size_t>{665280, 12352, 0, 0, 337952, 165}, "ECnet per-layer counts");
  o.require(ecnet.parameter_count() == 1015749, "ECnet total");
  o.require(counts(tfanet) == std::vector<std::size_t>{2219840, 0, 2080, 0, 165}, "TFAnet per-layer counts");
  o.require(took < kCountsSeconds, "took " + fmt("%.2f s", took));
  if (o.pass) o.detail = "ECnet total 1015749; " + fmt("%.3f s", took);
  return o;
}

Outcome shapes() {
  Outcome o;
  const auto rows = build_ecnet(10395, 330).summary();
  const std::vector<Shape> expected = {{{330, 64}}, {{330, 64}}, {{165, 64}}, {{10560}}, {{32}}, {{5}}};
  o.require(rows.size() == expected.size(), "layer count " + std::to_string(rows.size()));
  std::string chain;
  for (std::size_t i = 0; i < rows.size() && i < expected.size(); ++i) {
    o.require(rows[i].output == expected[i], rows[i].name + " is " + rows[i].output.to_string());
    chain += (i ? " -> " : "") + rows[i].output.to_string();
  }
  if (o.pass) o.detail = chain;
  return o;
}

Tensor2 random_tensor(std::size_t rows, std::size_t cols, Rng& rng) {
  std::uniform_real_distribution<double> mag(0.1, 1.0);
  Tensor2 t(rows, cols);
  for (auto& v : t.values()) v = (rng() & 1) ? mag(rng) : -mag(rng);
  return t;
}

Tensor2 distinct_tensor(std::size_t rows, std::size_t cols, Rng& rng) {
  std::vector<double> v(rows * cols);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = (static_cast<double>(i) - v.size() / 2.0) * 0.01 + 0.005;
  std::shuffle(v.begin(), v.end(), rng);
  return Tensor2(rows, cols, std::move(v));
}

double layer_error(Layer& layer, Tensor2 input, Rng& rng, bool input_grad) {
  const Tensor2 probe = layer.infer(input);
  const Tensor2 weights = random_tensor(probe.rows(), probe.cols(), rng);
  auto objective = [&] {
    const Tensor2 out = layer.infer(input);
    double s = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) s += out[i] * weights[i];
    return s;
  };
  for (auto& p : layer.parameters()) p.grad.fill(0.0);
  layer.forward(input, Mode::Infer, rng);
  const Tensor2 analytic = layer.backward(weights, input_grad);
  double worst = 0.0;
  for (auto& p : layer.parameters()) {
    worst = std::max(worst, oracle::max_relative_error(p.grad, oracle::numeric_gradient(p.value, objective)));
  }
  if (input_grad) {
    worst = std::max(worst, oracle::max_relative_error(analytic, oracle::numeric_gradient(input, objective)));
  }
  return worst;
}

double loss_error(Rng& rng) {
  Tensor2 z = random_tensor(1, kGenreCount, rng);
  std::vector<double> t(kGenreCount);
  for (auto& v : t) v = (rng() & 1) ? 1.0 : 0.0;
  auto loss_at = [&] {
    std::vector<double> p(kGenreCount);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = sigmoid(z[i] * 3.0);
    return bce_multilabel(p, t);
  };
  Tensor2 analytic = Tensor2::row_vector(loss_at().grad_logits);
  for (auto& g : analytic.values()) g *= 3.0;
  return oracle::max_relative_error(analytic, oracle::numeric_gradient(z, [&] { return loss_at().loss; }));
}

Outcome gradients() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  Rng rng(20240601);
  auto between = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
  double worst = 0.0;
  for (int trial = 0; trial < kGradConfigurations; ++trial) {
    // First configuration is the documented toy size.
    const bool toy = trial == 0;
    const std::size_t V = toy ? 7 : between(1, 9), d = toy ? 4 : between(1, 5), L = toy ? 6 : between(2, 8);
    const std::size_t F = toy ? 3 : between(1, 4), k = toy ? 3 : 2 * between(0, 2) + 1, m = toy ? 5 : between(1, 6);
    const std::size_t pool = toy ? 2 : between(1, std::min<std::size_t>(3, L));

    Embedding emb(V, d, L, rng);
    Tensor2 idx(1, L);
    for (auto& v : idx.values()) v = static_cast<double>(between(0, V));
    worst = std::max(worst, layer_error(emb, idx, rng, false));
    Conv1dSame conv(d, F, k, rng);
    worst = std::max(worst, layer_error(conv, random_tensor(L, d, rng), rng, true));
    Activation relu_layer(ActivationKind::Relu);
    worst = std::max(worst, layer_error(relu_layer, random_tensor(L, F, rng), rng, true));
    MaxPool1d mp(pool);
    worst = std::max(worst, layer_error(mp, distinct_tensor(L, F, rng), rng, true));
    Flatten flat;
    worst = std::max(worst, layer_error(flat, random_tensor(L / pool, F, rng), rng, true));
    Dense dense((L / pool) * F, m, rng);
    worst = std::max(worst, layer_error(dense, random_tensor(1, (L / pool) * F, rng), rng, true));
    Activation sig(ActivationKind::Sigmoid);
    worst = std::max(worst, layer_error(sig, random_tensor(1, m, rng), rng, true));
    Dropout drop(0.3);
    worst = std::max(worst, layer_error(drop, random_tensor(1, m, rng), rng, true));
    worst = std::max(worst, loss_error(rng));
  }
  const double took = seconds_since(start);
  o.require(worst < kGradTolerance, "max relative error " + fmt("%.3g", worst));
  o.require(took < kGradSeconds, "took " + fmt("%.1f s", took));
  if (o.pass) o.detail = std::to_string(kGradConfigurations) + " configurations, max rel err " + fmt("%.2e", worst) +
                         "; " + fmt("%.2f s", took);
  return o;
}

Outcome overfit() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const auto corpus = test_support::keyword_corpus(20);
  const auto cfg = test_support::keyword_config(corpus);
  const auto model = train(build_ecnet(cfg), corpus.samples, {}, cfg, corpus.vocab.hash());
  const double took = seconds_since(start);
  const double loss = evaluate_loss(model.network, corpus.samples);
  const double exact = subset_accuracy(model.network, corpus.samples);
  o.require(cfg.epochs == 200 && cfg.learning_rate == 0.001, "configuration drifted");
  o.require(loss < kOverfitLoss, "train BCE " + fmt("%.4f", loss));
  o.require(exact == 1.0, "exact match " + fmt("%.2f", exact));
  o.require(took < kOverfitSeconds, "took " + fmt("%.1f s", took));
  if (o.pass) o.detail = "BCE " + fmt("%.2e", loss) + ", exact match 100%; " + fmt("%.2f s", took);
  return o;
}

Outcome metric_oracles() {
  Outcome o;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> coarse(0, 4);
  std::size_t compared = 0;
  double worst_prevalence = 0.0;
  for (std::size_t n = 1; n <= 12; ++n) {
    std::vector<std::vector<double>> score_sets(5, std::vector<double>(n));
    for (std::size_t s = 0; s < score_sets.size(); ++s) {
      for (auto& v : score_sets[s]) v = s < 3 ? u(rng) : coarse(rng) / 4.0;  // two sets carry ties
    }
    const std::vector<double> constant(n, 0.42);
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      std::vector<bool> truths(n);
      std::size_t positives = 0;
      for (std::size_t i = 0; i < n; ++i) positives += (truths[i] = (mask >> i) & 1) ? 1 : 0;
      const test_support::Bools t(truths);
      if (positives == 0) {
        try {
          pr_curve(score_sets[0], t);
          o.require(false, "no-positive pattern accepted");
        } catch (const Error& e) {
          o.require(e.code() == ErrorCode::NoPositives, "wrong error for no positives");
        }
        continue;
      }
      for (const auto& scores : score_sets) {
        const double got = au_prc(pr_curve(scores, t));
        const double want = oracle::brute_force_ap(scores, truths);
        o.require(got == want, "n=" + std::to_string(n) + " mask=" + std::to_string(mask) + ": " + fmt("%.17g", got) +
                                   " vs " + fmt("%.17g", want));
        ++compared;
      }
      const double prevalence = static_cast<double>(positives) / static_cast<double>(n);
      worst_prevalence = std::max(worst_prevalence, std::abs(au_prc(pr_curve(constant, t)) - prevalence));
    }
  }
  o.require(worst_prevalence <= kPrevalenceTolerance, "constant-score AP off by " + fmt("%.3g", worst_prevalence));
  if (o.pass) {
    o.detail = std::to_string(compared) + " exact oracle matches; constant-score error " + fmt("%.1e", worst_prevalence);
  }
  return o;
}

Outcome tfidf_oracle() {
  Outcome o;
  std::mt19937_64 rng(99);
  const std::vector<std::string> words = {"alien", "war", "love", "ghost", "laugh", "ship", "night"};
  auto random_docs = [&](std::size_t count) {
    std::uniform_int_distribution<std::size_t> len(0, 8), pick(0, words.size() - 1);
    std::vector<std::vector<std::string>> docs(count);
    for (auto& d : docs) {
      for (std::size_t i = len(rng); i > 0; --i) d.push_back(words[pick(rng)]);
    }
    if (std::all_of(docs.begin(), docs.end(), [](const auto& d) { return d.empty(); })) docs[0].push_back("war");
    return docs;
  };
  std::size_t vectors = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto docs = random_docs(1 + rng() % 20);
    const std::size_t min_df = 1 + rng() % 3;
    const std::optional<std::size_t> cap = (rng() & 1) ? std::optional<std::size_t>(1 + rng() % 15) : std::nullopt;
    const auto model = fit_tfidf(docs, min_df, cap);
    const auto ref = oracle::naive_fit(docs, min_df, cap);
    o.require(model.size() == ref.grams.size(), "vocabulary size differs");
    for (std::size_t i = 0; o.pass && i < ref.grams.size(); ++i) {
      o.require(model.ngram(i) == ref.grams[i] && model.idf(i) == ref.idf[i], "n-gram " + std::to_string(i) + " differs");
    }
    for (const auto& doc : random_docs(5)) {
      o.require(model.transform(doc).to_dense() == ref.transform(doc), "transform differs");
      ++vectors;
    }
    const auto serialized = model.serialize();
    std::shuffle(docs.begin(), docs.end(), rng);
    o.require(fit_tfidf(docs, min_df, cap).serialize() == serialized, "fit depends on document order");
  }
  if (o.pass) o.detail = "100 fits, " + std::to_string(vectors) + " vectors bit-identical; permutation-invariant";
  return o;
}

struct Cli {
  int code;
  std::string out, err;
};

Cli cli_run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> build_args(const fs::path& out, const std::string& modalities) {
  const auto stub = test_support::stub_plugin().string();
  return {"build-corpus", "--manifest", (test_support::fixture_dir() / "mini" / "manifest.csv").string(),
          "--out", out.string(), "--speech-plugin", stub, "--situation-plugin", stub, "--modalities", modalities};
}

Outcome determinism(const fs::path& work) {
  Outcome o;
  for (const char* run : {"run1", "run2"}) {
    const auto dir = work / run;
    auto b = cli_run(build_args(dir / "corpus.tsv", "S,D,M"));
    o.require(b.code == 0, std::string(run) + " build-corpus exit " + std::to_string(b.code) + ": " + b.err);
    auto t = cli_run({"train", "--corpus", (dir / "corpus.tsv").string(), "--out", (dir / "model").string(),
                      "--epochs", "3", "--seed", "7", "--min-df", "1", "--quiet"});
    o.require(t.code == 0, std::string(run) + " train exit " + std::to_string(t.code) + ": " + t.err);
  }
  if (!o.pass) return o;
  o.require(test_support::slurp(work / "run1" / "corpus.tsv") == test_support::slurp(work / "run2" / "corpus.tsv"),
            "corpus bytes differ");
  o.require(test_support::slurp(work / "run1" / "model" / "model.ckpt") ==
                test_support::slurp(work / "run2" / "model" / "model.ckpt"),
            "checkpoint bytes differ");

  // M_D: every trailer's fused text is exactly dialogue followed by metadata.
  auto md = cli_run(build_args(work / "md.tsv", "D,M"));
  o.require(md.code == 0, "M_D build-corpus exit " + std::to_string(md.code));
  if (!o.pass) return o;
  std::istringstream md_in(test_support::slurp(work / "md.tsv"));
  const auto md_entries = read_corpus(md_in);
  const auto records = load_manifest(test_support::fixture_dir() / "mini" / "manifest.csv");
  SubprocessSpeechRecognizer speech({test_support::stub_plugin(), work / "exchange", std::chrono::seconds(30)});
  SubprocessSituationRecognizer situation({test_support::stub_plugin(), work / "exchange", std::chrono::seconds(30)});
  PipelineOptions opts;
  opts.media_root = test_support::fixture_dir() / "mini";
  opts.modalities = ModalityMask::parse("D,M");
  o.require(md_entries.size() == records.size(), "M_D corpus size");
  std::size_t with_video = 0;
  for (std::size_t i = 0; o.pass && i < records.size(); ++i) {
    const auto c = prepare_inference_corpus(records[i], {&speech, &situation}, opts);
    o.require(c.c_s.empty(), records[i].id + " has situation text under M_D");
    o.require(md_entries[i].text == fuse(c.c_d, "", c.c_m), records[i].id + " M_D text is not dialogue+metadata");
    with_video += records[i].video_path ? 1 : 0;
  }
  if (o.pass) {
    o.detail = "corpus and checkpoint byte-identical; M_D situation segment empty for " +
               std::to_string(records.size()) + " trailers (" + std::to_string(with_video) + " with video)";
  }
  return o;
}

bool values_in_unit_interval(const fs::path& csv_path, Outcome& o) {
  std::istringstream in(test_support::slurp(csv_path));
  const auto rows = csv::read(in);
  o.require(rows.size() > 1, csv_path.filename().string() + " is empty");
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].back() == "n/a") continue;
    const double v = std::stod(rows[r].back());
    o.require(v >= 0.0 && v <= 1.0, csv_path.filename().string() + " value " + rows[r].back());
  }
  return o.pass;
}

bool all_values_are_one(const fs::path& csv_path, Outcome& o) {
  std::istringstream in(test_support::slurp(csv_path));
  const auto rows = csv::read(in);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    o.require(rows[r].back() == "1.000000", csv_path.filename().string() + " row " + std::to_string(r) + " is " +
                                                 rows[r].back());
  }
  return o.pass;
}

Outcome smoke(const fs::path& work) {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const auto corpus = work / "corpus.tsv";
  auto b = cli_run(build_args(corpus, "S,D,M"));
  o.require(b.code == 0, "build-corpus exit " + std::to_string(b.code) + ": " + b.err);
  auto t = cli_run({"train", "--corpus", corpus.string(), "--out", (work / "model").string(), "--epochs", "5",
                    "--min-df", "1", "--quiet"});
  o.require(t.code == 0, "train exit " + std::to_string(t.code) + ": " + t.err);
  auto e = cli_run({"evaluate", "--checkpoint", (work / "model" / "model.ckpt").string(), "--corpus",
                    corpus.string(), "--out", (work / "eval").string()});
  o.require(e.code == 0, "evaluate exit " + std::to_string(e.code) + ": " + e.err);
  if (!o.pass) return o;
  for (const char* f : {"prf.csv", "au_prc.csv", "genre_au_prc.csv"}) values_in_unit_interval(work / "eval" / f, o);

  // Perfect oracle: the fixture's own truths leaked as scores.
  std::istringstream in(test_support::slurp(corpus));
  std::string scores = "trailer_id,Action,Comedy,Horror,Romance,Science Fiction,truth\n";
  for (const auto& entry : read_corpus(in)) {
    scores += entry.trailer_id;
    for (char c : entry.labels.to_bits()) scores += c == '1' ? ",1" : ",0";
    scores += "," + entry.labels.to_bits() + "\n";
  }
  test_support::spit(work / "oracle.csv", scores);
  auto p = cli_run({"evaluate", "--scores", (work / "oracle.csv").string(), "--out", (work / "oracle").string()});
  o.require(p.code == 0, "oracle evaluate exit " + std::to_string(p.code));
  if (!o.pass) return o;
  for (const char* f : {"prf.csv", "au_prc.csv", "genre_au_prc.csv"}) all_values_are_one(work / "oracle" / f, o);
  const double took = seconds_since(start);
  o.require(took < kSmokeSeconds, "took " + fmt("%.1f s", took));
  if (o.pass) o.detail = "reports in [0,1]; perfect oracle 1.00 everywhere; " + fmt("%.2f s", took);
  return o;
}

Outcome guarded(const std::function<Outcome()>& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return {false, std::string("exception: ") + e.what()};
  }
}

}  // namespace

int main() {
  test_support::TempDir work;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"AC1 parameter counts", parameter_counts},
      {"AC2 ECnet shapes", shapes},
      {"AC3 gradient check", gradients},
      {"AC4 overfit sanity", overfit},
      {"AC5 AU(PRC) oracle", metric_oracles},
      {"AC6 TF-IDF oracle", tfidf_oracle},
      {"AC7 pipeline determinism", [&] { return determinism(work / "ac7"); }},
      {"AC8 end-to-end smoke", [&] { return smoke(work / "ac8"); }},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    const auto o = guarded(fn);
    failures += o.pass ? 0 : 1;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
