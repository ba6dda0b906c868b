#pragma once

#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fretting/core.hpp"
#include "fretting/difficulty.hpp"
#include "fretting/postprocess.hpp"

namespace fretting {

namespace detail {

inline void require_same_count(const Piece& reference, const Piece& predicted) {
  if (reference.notes.size() != predicted.notes.size()) {
    throw AlignmentError(reference.notes.size(), predicted.notes.size(), "predicted note count differs from reference");
  }
}

struct MatchCounts {
  std::size_t pitch = 0;
  std::size_t tab = 0;
  std::size_t total = 0;
};

/// Notes are paired by index in timing order, so both pieces must describe
/// the same notes.
inline MatchCounts count_matches(const Piece& reference, const Piece& predicted, const GuitarConfig& config) {
  require_same_count(reference, predicted);
  const auto ref_order = timing_order(reference);
  const auto pred_order = timing_order(predicted);
  MatchCounts m;
  m.total = reference.notes.size();
  for (std::size_t k = 0; k < m.total; ++k) {
    const auto& ref = reference.notes[ref_order[k]];
    const auto& pred = predicted.notes[pred_order[k]];
    if (pred.position && is_valid(config, *pred.position) && sounding_pitch(config, *pred.position) == ref.pitch) {
      ++m.pitch;
    }
    if (pred.position && ref.position && *pred.position == *ref.position) ++m.tab;
  }
  return m;
}

inline double percent(std::size_t hits, std::size_t total) {
  return total == 0 ? 100.0 : 100.0 * static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace detail

/// Share of notes whose predicted position sounds the reference pitch under
/// `config`; alternative fingerings count as correct. 100 for empty pieces.
inline double pitch_accuracy(const Piece& reference, const Piece& predicted, const GuitarConfig& config) {
  const auto m = detail::count_matches(reference, predicted, config);
  return detail::percent(m.pitch, m.total);
}

/// Share of notes whose predicted (string, fret) equals the reference.
inline double tab_accuracy(const Piece& reference, const Piece& predicted) {
  const auto m = detail::count_matches(reference, predicted, predicted.config);
  return detail::percent(m.tab, m.total);
}

struct PieceReport {
  std::string source_id;
  std::size_t note_count = 0;
  double pitch_accuracy = 100.0;
  double tab_accuracy = 100.0;
  double difficulty = 0.0;
};

/// Metrics for one arranger over a set of pieces. Aggregate accuracies are
/// note-weighted (total matches over total notes); aggregate difficulty is
/// the mean over all transitions. The macro fields average per-piece values.
struct ArrangementReport {
  std::string arranger;
  double pitch_accuracy = 100.0;
  double tab_accuracy = 100.0;
  double difficulty = 0.0;
  std::size_t note_count = 0;
  double macro_pitch_accuracy = 100.0;
  double macro_tab_accuracy = 100.0;
  double macro_difficulty = 0.0;
  std::vector<PieceReport> pieces;
};

/// Builds a report from (reference, predicted) pairs; predicted pieces must
/// already be aligned with their references.
inline ArrangementReport make_report(const std::string& name, const std::vector<Piece>& references,
                                     const std::vector<Piece>& predictions, const DifficultyParams& params = {},
                                     bool with_difficulty = true) {
  if (references.size() != predictions.size()) {
    throw AlignmentError(references.size(), predictions.size(), "prediction count differs from reference count");
  }
  ArrangementReport report;
  report.arranger = name;
  std::size_t pitch_hits = 0, tab_hits = 0, transitions = 0;
  double transition_total = 0.0;
  for (std::size_t i = 0; i < references.size(); ++i) {
    const auto m = detail::count_matches(references[i], predictions[i], predictions[i].config);
    PieceReport pr;
    pr.source_id = references[i].source_id;
    pr.note_count = m.total;
    pr.pitch_accuracy = detail::percent(m.pitch, m.total);
    pr.tab_accuracy = detail::percent(m.tab, m.total);
    if (with_difficulty) pr.difficulty = piece_difficulty(predictions[i], params);
    pitch_hits += m.pitch;
    tab_hits += m.tab;
    report.note_count += m.total;
    if (with_difficulty && m.total > 1) {
      transitions += m.total - 1;
      transition_total += total_transition_difficulty(predictions[i], params);
    }
    report.pieces.push_back(pr);
  }
  report.pitch_accuracy = detail::percent(pitch_hits, report.note_count);
  report.tab_accuracy = detail::percent(tab_hits, report.note_count);
  report.difficulty = transitions == 0 ? 0.0 : transition_total / static_cast<double>(transitions);
  if (!report.pieces.empty()) {
    double p = 0, t = 0, d = 0;
    for (const auto& pr : report.pieces) {
      p += pr.pitch_accuracy;
      t += pr.tab_accuracy;
      d += pr.difficulty;
    }
    const auto n = static_cast<double>(report.pieces.size());
    report.macro_pitch_accuracy = p / n;
    report.macro_tab_accuracy = t / n;
    report.macro_difficulty = d / n;
  }
  return report;
}

struct NamedArranger {
  std::string name;
  std::function<Piece(const Piece&)> arrange;
};

/// One report per arranger, in the given order, each run on every reference.
inline std::vector<ArrangementReport> compare(const std::vector<Piece>& references,
                                              const std::vector<NamedArranger>& arrangers,
                                              const DifficultyParams& params = {}) {
  std::vector<ArrangementReport> out;
  for (const auto& a : arrangers) {
    std::vector<Piece> predictions;
    for (const auto& ref : references) predictions.push_back(a.arrange(ref));
    out.push_back(make_report(a.name, references, predictions, params));
  }
  return out;
}

inline std::vector<ArrangementReport> compare(const Piece& reference, const std::vector<NamedArranger>& arrangers,
                                              const DifficultyParams& params = {}) {
  return compare(std::vector<Piece>{reference}, arrangers, params);
}

inline std::string format_number(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

/// Tab-separated table: one row per piece and two aggregate rows per arranger.
inline std::string report_tsv(const std::vector<ArrangementReport>& reports, bool with_difficulty = true) {
  std::string out =
      "# aggregate 'ALL' rows are note-weighted (accuracies) and transition-weighted (difficulty); "
      "'MACRO' rows average per-piece values\n";
  out += std::string("arranger\tpiece\tnotes\tpitch_accuracy\ttab_accuracy") + (with_difficulty ? "\tdifficulty" : "") + "\n";
  auto row = [&](const std::string& a, const std::string& p, std::size_t n, double pa, double ta, double d) {
    out += a + "\t" + p + "\t" + std::to_string(n) + "\t" + format_number(pa, 2) + "\t" + format_number(ta, 2);
    if (with_difficulty) out += "\t" + format_number(d, 4);
    out += "\n";
  };
  for (const auto& r : reports) {
    for (const auto& p : r.pieces) row(r.arranger, p.source_id, p.note_count, p.pitch_accuracy, p.tab_accuracy, p.difficulty);
    row(r.arranger, "ALL", r.note_count, r.pitch_accuracy, r.tab_accuracy, r.difficulty);
    row(r.arranger, "MACRO", r.note_count, r.macro_pitch_accuracy, r.macro_tab_accuracy, r.macro_difficulty);
  }
  return out;
}

inline nlohmann::ordered_json report_json(const std::vector<ArrangementReport>& reports, bool with_difficulty = true) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json j;
    j["arranger"] = r.arranger;
    j["pitch_accuracy"] = r.pitch_accuracy;
    j["tab_accuracy"] = r.tab_accuracy;
    if (with_difficulty) j["difficulty"] = r.difficulty;
    j["note_count"] = r.note_count;
    j["macro"] = {{"pitch_accuracy", r.macro_pitch_accuracy}, {"tab_accuracy", r.macro_tab_accuracy}};
    if (with_difficulty) j["macro"]["difficulty"] = r.macro_difficulty;
    auto pieces = nlohmann::ordered_json::array();
    for (const auto& p : r.pieces) {
      nlohmann::ordered_json pj = {{"source_id", p.source_id},
                                   {"note_count", p.note_count},
                                   {"pitch_accuracy", p.pitch_accuracy},
                                   {"tab_accuracy", p.tab_accuracy}};
      if (with_difficulty) pj["difficulty"] = p.difficulty;
      pieces.push_back(pj);
    }
    j["pieces"] = pieces;
    arr.push_back(j);
  }
  return arr;
}

}  // namespace fretting
