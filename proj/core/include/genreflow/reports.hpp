#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "genreflow/corpus.hpp"
#include "genreflow/genre.hpp"
#include "genreflow/metrics.hpp"

namespace genreflow {

/// Per-genre precision/recall/F1, three rows per genre.
/// CSV columns: genre,metric,<column>.
std::string prf_table_csv(const std::array<Prf, kGenreCount>& prf, const std::string& column = "value");
std::string prf_table_text(const std::array<Prf, kGenreCount>& prf, const std::string& column = "value");

/// One AU(PRC) figure per feature set and model.
struct AuPrcRow {
  std::string features;  // e.g. "Situation+Dialogue (M_SD)"
  std::string model;     // e.g. "ECnet"
  std::optional<double> value;  // nullopt prints as "n/a"
};

/// CSV columns: features,model,<column>.
std::string model_au_prc_csv(const std::vector<AuPrcRow>& rows, const std::string& column = "au_prc");
std::string model_au_prc_text(const std::vector<AuPrcRow>& rows, const std::string& column = "AU(PRC)");

/// Per-genre AU(PRC); genres without positives are reported as "n/a".
/// CSV columns: genre,<column>.
std::string genre_au_prc_csv(const std::array<std::optional<double>, kGenreCount>& values,
                             const std::string& column = "au_prc");
std::string genre_au_prc_text(const std::array<std::optional<double>, kGenreCount>& values,
                              const std::string& column = "AU(PRC)");

/// All curves in one CSV: curve,threshold,recall,precision. Curves are named
/// by genre, plus "micro"; missing curves are skipped.
std::string pr_curves_csv(const std::array<std::optional<PrCurve>, kGenreCount>& per_genre,
                          const std::optional<PrCurve>& micro);

/// "Situation+Dialogue+Metadata (M_SD)" style label.
std::string feature_set_label(const ModalityMask& mask);

}  // namespace genreflow
