#include <gtest/gtest.h>

#include "test_support.hpp"

namespace fretting {
namespace {

using testing::note;

Piece four_notes() {
  return testing::make_piece(
      {note(0, 120, 55, 3, 0), note(120, 240, 57, 3, 2), note(240, 360, 59, 2, 0), note(360, 480, 60, 2, 1)});
}

TEST(PitchAccuracy, Examples) {
  const Piece ref = four_notes();
  EXPECT_EQ(pitch_accuracy(ref, ref, ref.config), 100.0);
  Piece wrong = ref;
  wrong.notes[1].position = Position{3, 3};
  EXPECT_EQ(pitch_accuracy(ref, wrong, ref.config), 75.0);
  Piece alt = ref;
  alt.notes[0].position = Position{4, 5};
  alt.notes[1].position = Position{4, 7};
  alt.notes[2].position = Position{3, 4};
  alt.notes[3].position = Position{3, 5};
  EXPECT_EQ(pitch_accuracy(ref, alt, ref.config), 100.0);
  EXPECT_EQ(tab_accuracy(ref, alt), 0.0);
}

TEST(TabAccuracy, Examples) {
  const Piece ref = testing::make_piece({note(0, 120, 55, 3, 0), note(120, 240, 57, 3, 2)});
  EXPECT_EQ(tab_accuracy(ref, ref), 100.0);
  Piece half = ref;
  half.notes[1].position = Position{4, 7};
  EXPECT_EQ(tab_accuracy(ref, half), 50.0);
}

TEST(Accuracy, MissingPositionsCountAsMisses) {
  const Piece ref = four_notes();
  Piece pred = ref;
  pred.notes[0].position.reset();
  EXPECT_EQ(pitch_accuracy(ref, pred, ref.config), 75.0);
  EXPECT_EQ(tab_accuracy(ref, pred), 75.0);
}

TEST(Accuracy, CountMismatchIsAlignmentError) {
  const Piece ref = four_notes();
  Piece pred = ref;
  pred.notes.pop_back();
  EXPECT_THROW(pitch_accuracy(ref, pred, ref.config), AlignmentError);
}

TEST(Accuracy, SelfComparisonIsPerfect) {
  std::mt19937_64 rng(73);
  for (int i = 0; i < 30; ++i) {
    const Piece p = testing::random_polyphonic_piece(rng, 30);
    EXPECT_EQ(pitch_accuracy(p, p, p.config), 100.0);
    EXPECT_EQ(tab_accuracy(p, p), 100.0);
  }
}

TEST(Compare, BaselineAgainstItself) {
  const Piece ref = arrange_baseline(four_notes(), GuitarConfig{});
  const auto reports = compare(ref, {{"baseline", [](const Piece& p) { return arrange_baseline(p, p.config); }},
                                     {"astar", [](const Piece& p) { return arrange_optimal(p, p.config); }}});
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_EQ(reports[0].pitch_accuracy, 100.0);
  EXPECT_EQ(reports[0].tab_accuracy, 100.0);
  EXPECT_EQ(reports[1].pitch_accuracy, 100.0);
  EXPECT_LE(reports[1].difficulty, reports[0].difficulty);
}

TEST(Report, EmptyPieceRow) {
  const auto r = make_report("x", {Piece{}}, {Piece{}});
  ASSERT_EQ(r.pieces.size(), 1u);
  EXPECT_EQ(r.pieces[0].note_count, 0u);
  EXPECT_EQ(r.pieces[0].pitch_accuracy, 100.0);
  EXPECT_EQ(r.pieces[0].tab_accuracy, 100.0);
  EXPECT_EQ(r.pieces[0].difficulty, 0.0);
  const std::string tsv = report_tsv({r});
  EXPECT_NE(tsv.find("x\t\t0\t100.00\t100.00\t0.0000\n"), std::string::npos) << tsv;
}

TEST(Report, MicroAndMacroAggregates) {
  const Piece a = four_notes();
  Piece a_pred = a;
  a_pred.notes[0].position = Position{4, 5};  // tab miss, pitch hit
  const Piece b = testing::make_piece({note(0, 120, 40, 6, 0), note(120, 240, 45, 5, 0)});
  Piece b_pred = b;
  b_pred.notes[0].position = Position{6, 1};  // pitch miss
  const auto r = make_report("m", {a, b}, {a_pred, b_pred});
  EXPECT_DOUBLE_EQ(r.tab_accuracy, 100.0 * 4 / 6);
  EXPECT_DOUBLE_EQ(r.macro_tab_accuracy, (75.0 + 50.0) / 2);
  EXPECT_DOUBLE_EQ(r.pitch_accuracy, 100.0 * 5 / 6);
  const double transitions = total_transition_difficulty(a_pred) + total_transition_difficulty(b_pred);
  EXPECT_DOUBLE_EQ(r.difficulty, transitions / 4);
  const auto no_diff = report_tsv({make_report("m", {a, b}, {a_pred, b_pred}, {}, false)}, false);
  EXPECT_EQ(no_diff.find("\tdifficulty"), std::string::npos);
  const auto json = report_json({r});
  EXPECT_EQ(json[0]["note_count"], 6);
}

}  // namespace
}  // namespace fretting
