#include "genreflow/reports.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "genreflow/csv.hpp"

namespace genreflow {
namespace {

// Fixed precision keeps reports byte-stable across platforms.
std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string csv_line(const std::vector<std::string>& fields) {
  std::ostringstream out;
  csv::write_row(out, fields);
  return out.str();
}

// Left-aligned columns separated by two spaces.
std::string aligned(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths;
  for (const auto& r : rows) {
    widths.resize(std::max(widths.size(), r.size()), 0);
    for (std::size_t c = 0; c < r.size(); ++c) widths[c] = std::max(widths[c], r[c].size());
  }
  std::string out;
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t c = 0; c < r.size(); ++c) {
      line += r[c];
      if (c + 1 < r.size()) line += std::string(widths[c] - r[c].size() + 2, ' ');
    }
    out += line + "\n";
  }
  return out;
}

std::vector<std::vector<std::string>> prf_rows(const std::array<Prf, kGenreCount>& prf, int digits) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t g = 0; g < kGenreCount; ++g) {
    const std::string genre(genre_name(kAllGenres[g]));
    rows.push_back({genre, "P", fixed(prf[g].precision, digits)});
    rows.push_back({genre, "R", fixed(prf[g].recall, digits)});
    rows.push_back({genre, "F1", fixed(prf[g].f1, digits)});
  }
  return rows;
}

std::string maybe(const std::optional<double>& v, int digits) { return v ? fixed(*v, digits) : "n/a"; }

}  // namespace

std::string prf_table_csv(const std::array<Prf, kGenreCount>& prf, const std::string& column) {
  std::string out = csv_line({"genre", "metric", column});
  for (const auto& r : prf_rows(prf, 6)) out += csv_line(r);
  return out;
}

std::string prf_table_text(const std::array<Prf, kGenreCount>& prf, const std::string& column) {
  std::vector<std::vector<std::string>> rows{{"Genre", "Metric", column}};
  for (auto& r : prf_rows(prf, 2)) rows.push_back(std::move(r));
  return aligned(rows);
}

std::string model_au_prc_csv(const std::vector<AuPrcRow>& rows, const std::string& column) {
  std::string out = csv_line({"features", "model", column});
  for (const auto& r : rows) out += csv_line({r.features, r.model, maybe(r.value, 6)});
  return out;
}

std::string model_au_prc_text(const std::vector<AuPrcRow>& rows, const std::string& column) {
  std::vector<std::vector<std::string>> table{{"Features", "Model", column}};
  for (const auto& r : rows) table.push_back({r.features, r.model, maybe(r.value, 2)});
  return aligned(table);
}

std::string genre_au_prc_csv(const std::array<std::optional<double>, kGenreCount>& values, const std::string& column) {
  std::string out = csv_line({"genre", column});
  for (std::size_t g = 0; g < kGenreCount; ++g) {
    out += csv_line({std::string(genre_name(kAllGenres[g])), maybe(values[g], 6)});
  }
  return out;
}

std::string genre_au_prc_text(const std::array<std::optional<double>, kGenreCount>& values,
                              const std::string& column) {
  std::vector<std::vector<std::string>> table{{"Genre", column}};
  for (std::size_t g = 0; g < kGenreCount; ++g) {
    table.push_back({std::string(genre_name(kAllGenres[g])), maybe(values[g], 2)});
  }
  return aligned(table);
}

std::string pr_curves_csv(const std::array<std::optional<PrCurve>, kGenreCount>& per_genre,
                          const std::optional<PrCurve>& micro) {
  std::string out = csv_line({"curve", "threshold", "recall", "precision"});
  auto emit = [&](const std::string& name, const PrCurve& curve) {
    for (const auto& p : curve.points) {
      out += csv_line({name, fixed(p.threshold, 9), fixed(p.recall, 9), fixed(p.precision, 9)});
    }
  };
  for (std::size_t g = 0; g < kGenreCount; ++g) {
    if (per_genre[g]) emit(std::string(genre_name(kAllGenres[g])), *per_genre[g]);
  }
  if (micro) emit("micro", *micro);
  return out;
}

std::string feature_set_label(const ModalityMask& mask) {
  std::string words;
  auto add = [&](bool on, const char* word) {
    if (!on) return;
    if (!words.empty()) words += "+";
    words += word;
  };
  add(mask.situation, "Situation");
  add(mask.dialogue, "Dialogue");
  add(mask.metadata, "Metadata");
  return words + " (" + mask.model_label() + ")";
}

}  // namespace genreflow
