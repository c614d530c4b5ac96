#include "genreflow/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "genreflow/error.hpp"

namespace genreflow {
namespace {

double ratio(std::size_t num, std::size_t den) noexcept {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

void require_finite_scores(std::span<const double> scores) {
  for (double s : scores) {
    if (!std::isfinite(s)) throw Error(ErrorCode::InvalidArgument, "scores must be finite");
  }
}

void require_nonempty(std::span<const ScoredPrediction> preds) {
  if (preds.empty()) throw Error(ErrorCode::EmptyInput, "no predictions");
}

struct Column {
  std::vector<double> scores;
  std::unique_ptr<bool[]> truths;
  std::size_t size = 0;
  std::span<const bool> truth_span() const { return {truths.get(), size}; }
};

Column genre_column(std::span<const ScoredPrediction> preds, std::size_t g) {
  Column c;
  c.size = preds.size();
  c.scores.reserve(c.size);
  c.truths = std::make_unique<bool[]>(c.size);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    c.scores.push_back(preds[i].scores[g]);
    c.truths[i] = preds[i].truth[g];
  }
  return c;
}

}  // namespace

Prf prf_binary(std::span<const double> scores, std::span<const bool> truths, double threshold) {
  if (scores.size() != truths.size()) throw Error(ErrorCode::InvalidArgument, "scores and truths differ in length");
  require_finite_scores(scores);
  Prf r;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (predicted && truths[i]) ++r.true_positives;
    if (predicted && !truths[i]) ++r.false_positives;
    if (!predicted && truths[i]) ++r.false_negatives;
  }
  r.precision = ratio(r.true_positives, r.true_positives + r.false_positives);
  r.recall = ratio(r.true_positives, r.true_positives + r.false_negatives);
  r.f1 = (r.precision + r.recall) == 0.0 ? 0.0 : 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

std::array<Prf, kGenreCount> prf_at_threshold(std::span<const ScoredPrediction> preds, double threshold) {
  require_nonempty(preds);
  std::array<Prf, kGenreCount> out{};
  for (std::size_t g = 0; g < kGenreCount; ++g) {
    const auto col = genre_column(preds, g);
    out[g] = prf_binary(col.scores, col.truth_span(), threshold);
  }
  return out;
}

PrCurve pr_curve(std::span<const double> scores, std::span<const bool> truths) {
  if (scores.size() != truths.size()) throw Error(ErrorCode::InvalidArgument, "scores and truths differ in length");
  require_finite_scores(scores);
  PrCurve curve;
  curve.positives = static_cast<std::size_t>(std::count(truths.begin(), truths.end(), true));
  if (curve.positives == 0) throw Error(ErrorCode::NoPositives, "no positive labels");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });

  std::size_t tp = 0;
  std::size_t seen = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = scores[order[i]];
    for (; i < order.size() && scores[order[i]] == threshold; ++i) {
      ++seen;
      if (truths[order[i]]) ++tp;
    }
    curve.points.push_back({ratio(tp, curve.positives), ratio(tp, seen), threshold});
  }
  return curve;
}

double au_prc(const PrCurve& curve) noexcept {
  double area = 0.0;
  double prev_recall = 0.0;
  for (const auto& p : curve.points) {
    area += (p.recall - prev_recall) * p.precision;
    prev_recall = p.recall;
  }
  return area;
}

PrCurve micro_pr_curve(std::span<const ScoredPrediction> preds) {
  require_nonempty(preds);
  const std::size_t n = preds.size() * kGenreCount;
  std::vector<double> scores;
  scores.reserve(n);
  auto truths = std::make_unique<bool[]>(n);
  std::size_t k = 0;
  for (const auto& p : preds) {
    for (std::size_t g = 0; g < kGenreCount; ++g, ++k) {
      scores.push_back(p.scores[g]);
      truths[k] = p.truth[g];
    }
  }
  return pr_curve(scores, std::span<const bool>(truths.get(), n));
}

double micro_au_prc(std::span<const ScoredPrediction> preds) { return au_prc(micro_pr_curve(preds)); }

std::array<std::optional<PrCurve>, kGenreCount> per_genre_pr_curves(std::span<const ScoredPrediction> preds) {
  require_nonempty(preds);
  std::array<std::optional<PrCurve>, kGenreCount> out;
  for (std::size_t g = 0; g < kGenreCount; ++g) {
    const auto col = genre_column(preds, g);
    const auto truths = col.truth_span();
    if (std::find(truths.begin(), truths.end(), true) == truths.end()) continue;
    out[g] = pr_curve(col.scores, truths);
  }
  return out;
}

std::array<std::optional<double>, kGenreCount> per_genre_au_prc(std::span<const ScoredPrediction> preds) {
  std::array<std::optional<double>, kGenreCount> out;
  const auto curves = per_genre_pr_curves(preds);
  for (std::size_t g = 0; g < kGenreCount; ++g) {
    if (curves[g]) out[g] = au_prc(*curves[g]);
  }
  return out;
}

}  // namespace genreflow
