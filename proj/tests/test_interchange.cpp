#include <gtest/gtest.h>

#include "test_support.hpp"

namespace fretting {
namespace {

using testing::note;

TEST(Interchange, RoundTripAnnotatedNote) {
  Piece p = testing::make_piece({note(0, 480, 55, 3, 0)});
  p.source_id = "song.mid";
  const std::string text = write_interchange(p);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
  EXPECT_EQ(read_interchange(text), p);
}

TEST(Interchange, EmptyPieceIsHeaderOnly) {
  const Piece p;
  const std::string text = write_interchange(p);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
  EXPECT_EQ(read_interchange(text), p);
}

TEST(Interchange, RoundTripRandomPieces) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 50; ++i) {
    Piece p = testing::random_polyphonic_piece(rng, 32);
    if (i % 2) p = p.without_positions();
    EXPECT_EQ(read_interchange(write_interchange(p)), p);
  }
}

TEST(Interchange, ConfigSurvives) {
  Piece p = testing::make_piece({note(0, 480, 50, 6, 10)}, GuitarConfig{Tuning::drop_d(), 2, 24});
  const Piece back = read_interchange(write_interchange(p));
  EXPECT_EQ(back.config.tuning.name, TuningName::drop_d);
  EXPECT_EQ(back.config.capo, 2);
}

std::size_t error_line(const std::string& text) {
  try {
    read_interchange(text);
  } catch (const FormatError& e) {
    return e.location();
  }
  return 0;
}

TEST(Interchange, ErrorsNameTheLine) {
  const std::string header = R"({"ppq":480,"tuning":[64,59,55,50,45,40],"capo":0,"source_id":"x"})" "\n";
  EXPECT_EQ(error_line(header + R"({"start":0,"end":480,"pitch":55,"string":3})" "\n"), 2u);
  EXPECT_EQ(error_line(header + R"({"start":0,"end":480,"pitch":55})" "\n" R"({"start":0,"end":0,"pitch":55})"), 3u);
  EXPECT_EQ(error_line(header + R"({"start":0,"end":480,"pitch":55,"string":3,"fret":30})"), 2u);
  EXPECT_EQ(error_line(header + R"({"start":480,"end":960,"pitch":55})" "\n" R"({"start":0,"end":480,"pitch":55})"), 3u);
  EXPECT_EQ(error_line(header + "{not json"), 2u);
  EXPECT_EQ(error_line(R"({"start":0,"end":480,"pitch":55})"), 1u);
  EXPECT_EQ(error_line(R"({"ppq":480,"tuning":[64,59],"capo":0})"), 1u);
  EXPECT_THROW(read_interchange(std::string()), FormatError);
}

}  // namespace
}  // namespace fretting
