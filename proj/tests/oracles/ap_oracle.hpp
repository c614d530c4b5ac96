#pragma once

// Average precision by brute-force threshold enumeration: for each distinct
// score, recount every prediction from scratch.

#include <algorithm>
#include <vector>

namespace genreflow::oracle {

inline double brute_force_ap(const std::vector<double>& scores, const std::vector<bool>& truths) {
  std::vector<double> thresholds = scores;
  std::sort(thresholds.begin(), thresholds.end(), [](double a, double b) { return a > b; });
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  std::size_t positives = 0;
  for (bool t : truths) positives += t ? 1 : 0;

  double ap = 0.0;
  double prev_recall = 0.0;
  for (double th : thresholds) {
    std::size_t tp = 0;
    std::size_t predicted = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] >= th) {
        ++predicted;
        if (truths[i]) ++tp;
      }
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(positives);
    const double precision = static_cast<double>(tp) / static_cast<double>(predicted);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return ap;
}

}  // namespace genreflow::oracle
