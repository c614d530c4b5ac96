#include "genreflow/genre.hpp"

#include <algorithm>
#include <cctype>

#include "genreflow/error.hpp"

namespace genreflow {
namespace {

constexpr std::array<std::string_view, kGenreCount> kNames = {
    "Action", "Comedy", "Horror", "Romance", "Science Fiction"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

}  // namespace

std::string_view genre_name(Genre genre) noexcept {
  return kNames[static_cast<std::size_t>(genre)];
}

std::optional<Genre> parse_genre(std::string_view name) noexcept {
  name = trim(name);
  for (Genre g : kAllGenres) {
    if (iequals(name, genre_name(g))) return g;
  }
  return std::nullopt;
}

std::size_t LabelVector::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::string LabelVector::to_bits() const {
  std::string out(kGenreCount, '0');
  for (std::size_t i = 0; i < kGenreCount; ++i) {
    if (bits_[i]) out[i] = '1';
  }
  return out;
}

LabelVector LabelVector::from_bits(std::string_view bits) {
  if (bits.size() != kGenreCount) {
    throw Error(ErrorCode::InvalidArgument,
                "label bits must have " + std::to_string(kGenreCount) + " characters, got '" +
                    std::string(bits) + "'");
  }
  LabelVector out;
  for (std::size_t i = 0; i < kGenreCount; ++i) {
    if (bits[i] == '1') {
      out.bits_[i] = 1;
    } else if (bits[i] != '0') {
      throw Error(ErrorCode::InvalidArgument, "label bits must be 0/1, got '" + std::string(bits) + "'");
    }
  }
  return out;
}

std::vector<Genre> LabelVector::genres() const {
  std::vector<Genre> out;
  for (Genre g : kAllGenres) {
    if (test(g)) out.push_back(g);
  }
  return out;
}

LabelVector encode_genres(std::span<const std::string> names) {
  LabelVector out;
  for (const auto& name : names) {
    auto g = parse_genre(name);
    if (!g) throw Error(ErrorCode::UnknownGenre, "'" + name + "' is not one of the five genres");
    out.set(*g);
  }
  return out;
}

std::vector<std::string> decode_genres(const LabelVector& labels) {
  std::vector<std::string> out;
  for (Genre g : labels.genres()) out.emplace_back(genre_name(g));
  return out;
}

}  // namespace genreflow
