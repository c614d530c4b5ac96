#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace genreflow {

inline constexpr std::size_t kGenreCount = 5;

/// The five trailer genres, in the canonical label order used everywhere
/// (label vectors, network outputs, report rows).
enum class Genre : std::uint8_t { Action = 0, Comedy, Horror, Romance, ScienceFiction };

inline constexpr std::array<Genre, kGenreCount> kAllGenres = {
    Genre::Action, Genre::Comedy, Genre::Horror, Genre::Romance, Genre::ScienceFiction};

std::string_view genre_name(Genre genre) noexcept;

/// Case-insensitive match against the canonical names after trimming.
std::optional<Genre> parse_genre(std::string_view name) noexcept;

class LabelVector {
 public:
  LabelVector() = default;

  bool test(Genre genre) const noexcept { return bits_[index(genre)] != 0; }
  bool operator[](std::size_t i) const noexcept { return bits_[i] != 0; }
  void set(Genre genre) noexcept { bits_[index(genre)] = 1; }

  std::size_t count() const noexcept;
  bool any() const noexcept { return count() > 0; }

  /// "10100" style rendering in canonical order.
  std::string to_bits() const;
  static LabelVector from_bits(std::string_view bits);

  std::vector<Genre> genres() const;
  const std::array<std::uint8_t, kGenreCount>& bits() const noexcept { return bits_; }

  friend bool operator==(const LabelVector&, const LabelVector&) = default;

 private:
  static constexpr std::size_t index(Genre g) noexcept { return static_cast<std::size_t>(g); }
  std::array<std::uint8_t, kGenreCount> bits_{};
};

/// Throws Error(UnknownGenre) for names outside the label set. Duplicates are
/// harmless.
LabelVector encode_genres(std::span<const std::string> names);
std::vector<std::string> decode_genres(const LabelVector& labels);

}  // namespace genreflow
