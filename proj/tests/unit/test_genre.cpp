#include <gtest/gtest.h>

#include <random>

#include "genreflow/error.hpp"
#include "genreflow/genre.hpp"

using namespace genreflow;

namespace {

LabelVector encode(std::vector<std::string> names) { return encode_genres(names); }

}  // namespace

TEST(Genre, CanonicalOrderMatchesLabelColumns) {
  EXPECT_EQ(genre_name(Genre::Action), "Action");
  EXPECT_EQ(genre_name(Genre::Comedy), "Comedy");
  EXPECT_EQ(genre_name(Genre::Horror), "Horror");
  EXPECT_EQ(genre_name(Genre::Romance), "Romance");
  EXPECT_EQ(genre_name(Genre::ScienceFiction), "Science Fiction");
}

TEST(Genre, ParseIsTrimmedAndCaseInsensitive) {
  EXPECT_EQ(parse_genre("  science fiction "), Genre::ScienceFiction);
  EXPECT_EQ(parse_genre("HORROR"), Genre::Horror);
  EXPECT_FALSE(parse_genre("Western").has_value());
  EXPECT_FALSE(parse_genre("").has_value());
}

TEST(EncodeGenres, SpecExamples) {
  EXPECT_EQ(encode({"Science Fiction"}).to_bits(), "00001");
  EXPECT_EQ(encode({"Comedy", "Romance"}).to_bits(), "01010");
  EXPECT_EQ(encode({"Action", "Action"}).to_bits(), "10000");
  EXPECT_EQ(encode({"Action", "Horror"}).to_bits(), "10100");
}

TEST(EncodeGenres, UnknownGenreThrows) {
  try {
    encode({"Action", "Western"});
    FAIL() << "expected UnknownGenre";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownGenre);
  }
}

TEST(EncodeGenres, DecodeRoundTripsEverySubset) {
  for (unsigned mask = 0; mask < 32; ++mask) {
    std::string bits;
    for (int g = 0; g < 5; ++g) bits += (mask >> g) & 1 ? '1' : '0';
    const auto labels = LabelVector::from_bits(bits);
    EXPECT_EQ(encode_genres(decode_genres(labels)), labels) << bits;
    EXPECT_EQ(labels.to_bits(), bits);
  }
}

TEST(LabelVector, FromBitsRejectsMalformedInput) {
  for (const char* bad : {"", "1010", "101010", "10a01"}) {
    EXPECT_THROW(LabelVector::from_bits(bad), Error) << bad;
  }
}

TEST(LabelVector, CountAndGenres) {
  const auto l = LabelVector::from_bits("11001");
  EXPECT_EQ(l.count(), 3u);
  EXPECT_TRUE(l.any());
  EXPECT_EQ(l.genres(), (std::vector<Genre>{Genre::Action, Genre::Comedy, Genre::ScienceFiction}));
  EXPECT_FALSE(LabelVector{}.any());
}
