#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "genreflow/genre.hpp"

namespace genreflow {

struct ScoredPrediction {
  std::string trailer_id;
  std::array<double, kGenreCount> scores{};
  LabelVector truth;
};

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
};

inline constexpr double kDefaultThreshold = 0.5;

/// Counts score >= threshold as a positive prediction. Ratios with a zero
/// denominator are 0.
Prf prf_binary(std::span<const double> scores, std::span<const bool> truths, double threshold);

/// Per-genre P/R/F1. Errors: EmptyInput, InvalidArgument (non-finite score).
std::array<Prf, kGenreCount> prf_at_threshold(std::span<const ScoredPrediction> preds,
                                              double threshold = kDefaultThreshold);

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
  double threshold = 0.0;
};

/// One point per distinct score, in descending score order. The implicit
/// origin (recall 0) is not stored; the last point has recall 1.
struct PrCurve {
  std::vector<PrPoint> points;
  std::size_t positives = 0;
};

/// Errors: InvalidArgument (length mismatch, non-finite score), NoPositives.
PrCurve pr_curve(std::span<const double> scores, std::span<const bool> truths);

/// Step-interpolated average precision: sum of (R_i - R_{i-1}) * P_i with
/// R_0 = 0.
double au_prc(const PrCurve& curve) noexcept;

/// AU(PRC) over all (sample, genre) pairs flattened into one list.
/// Errors: EmptyInput, NoPositives.
double micro_au_prc(std::span<const ScoredPrediction> preds);
PrCurve micro_pr_curve(std::span<const ScoredPrediction> preds);

/// Per-genre AU(PRC); nullopt for a genre without positives.
std::array<std::optional<double>, kGenreCount> per_genre_au_prc(std::span<const ScoredPrediction> preds);
/// Per-genre curves; nullopt for a genre without positives.
std::array<std::optional<PrCurve>, kGenreCount> per_genre_pr_curves(std::span<const ScoredPrediction> preds);

}  // namespace genreflow
