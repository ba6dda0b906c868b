#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fretting/core.hpp"
#include "fretting/difficulty.hpp"

namespace fretting {

/// Widest fretted span allowed inside a chord; open strings are exempt.
inline constexpr int kMaxChordSpan = 4;

/// One way to finger a note group: a position per note, in the group's note order.
struct Fingering {
  std::vector<Position> positions;

  bool operator==(const Fingering&) const = default;
};

/// Candidate fingerings per note group of a piece; adjacent layers are fully
/// connected.
struct LayeredGraph {
  std::vector<NoteGroup> groups;
  std::vector<std::vector<Fingering>> layers;
};

namespace detail {

inline bool fingering_key_less(const Fingering& a, const Fingering& b) {
  return std::lexicographical_compare(a.positions.begin(), a.positions.end(), b.positions.begin(), b.positions.end(),
                                      [](Position x, Position y) {
                                        return std::tie(x.fret, x.string) < std::tie(y.fret, y.string);
                                      });
}

inline bool within_span(const std::vector<Position>& positions) {
  int lo = std::numeric_limits<int>::max();
  int hi = std::numeric_limits<int>::min();
  for (const auto& p : positions) {
    if (p.fret == 0) continue;
    lo = std::min(lo, p.fret);
    hi = std::max(hi, p.fret);
  }
  return lo > hi || hi - lo <= kMaxChordSpan;
}

inline void enumerate_fingerings(const std::vector<std::vector<Position>>& candidates, bool limit_span,
                                 std::vector<Position>& current, unsigned used_strings,
                                 std::vector<Fingering>& out) {
  if (current.size() == candidates.size()) {
    if (!limit_span || within_span(current)) out.push_back({current});
    return;
  }
  for (const Position& p : candidates[current.size()]) {
    const unsigned bit = 1u << p.string;
    if (used_strings & bit) continue;
    current.push_back(p);
    enumerate_fingerings(candidates, limit_span, current, used_strings | bit, out);
    current.pop_back();
  }
}

inline std::string at_step(std::size_t step, Tick tick) {
  return "time step " + std::to_string(step) + " (tick " + std::to_string(tick) + ")";
}

/// Piece with positions removed, notes in canonical (start, pitch) order.
inline Piece arrangement_input(const Piece& piece, const GuitarConfig& config) {
  config.validate();
  Piece out = piece.without_positions();
  out.config = config;
  return out;
}

inline void check_playable(const Piece& piece) {
  for (std::size_t i = 0; i < piece.notes.size(); ++i) {
    if (candidate_positions(piece.config, piece.notes[i].pitch).empty()) {
      throw DomainError("note " + std::to_string(i) + " (pitch " + std::to_string(piece.notes[i].pitch.midi()) +
                        ") is unplayable under this guitar configuration");
    }
  }
}

}  // namespace detail

/// Every collision-free fingering of the notes with distinct strings, and
/// with `limit_span`, a fretted span of at most four frets. Sorted by the
/// notes' (fret, string) keys in order.
inline std::vector<Fingering> chord_fingerings(const GuitarConfig& config, const std::vector<Pitch>& pitches,
                                               bool limit_span = true) {
  std::vector<Fingering> out;
  if (pitches.size() > static_cast<std::size_t>(kNumStrings)) return out;
  std::vector<std::vector<Position>> candidates;
  for (const Pitch p : pitches) candidates.push_back(candidate_positions(config, p));
  std::vector<Position> current;
  detail::enumerate_fingerings(candidates, limit_span, current, 0u, out);
  std::sort(out.begin(), out.end(), detail::fingering_key_less);
  return out;
}

/// Cost of playing a fingering on its own: transitions between its notes in
/// string order. Zero for a single note.
inline double fingering_cost(const Fingering& f, const DifficultyParams& params = {}) {
  std::vector<Position> ordered = f.positions;
  std::sort(ordered.begin(), ordered.end(), [](Position a, Position b) { return a.string < b.string; });
  double total = 0.0;
  for (std::size_t i = 1; i < ordered.size(); ++i) total += transition_difficulty(ordered[i - 1], ordered[i], params);
  return total;
}

/// Mean pairwise transition cost between two fingerings.
inline double fingering_transition_cost(const Fingering& from, const Fingering& to, const DifficultyParams& params = {}) {
  double total = 0.0;
  for (const Position& p : from.positions) {
    for (const Position& q : to.positions) total += transition_difficulty(p, q, params);
  }
  return total / static_cast<double>(from.positions.size() * to.positions.size());
}

inline LayeredGraph build_layered_graph(const Piece& piece) {
  LayeredGraph graph;
  graph.groups = note_groups(piece.notes);
  for (std::size_t g = 0; g < graph.groups.size(); ++g) {
    const NoteGroup group = graph.groups[g];
    const Tick tick = piece.notes[group.begin].start;
    if (group.size() > static_cast<std::size_t>(kNumStrings)) {
      throw DomainError("infeasible chord at " + detail::at_step(g, tick) + ": " + std::to_string(group.size()) +
                        " simultaneous notes");
    }
    std::vector<Pitch> pitches;
    for (std::size_t i = group.begin; i < group.end; ++i) pitches.push_back(piece.notes[i].pitch);
    auto layer = chord_fingerings(piece.config, pitches);
    if (layer.empty()) throw DomainError("infeasible chord at " + detail::at_step(g, tick) + ": no collision-free fingering");
    graph.layers.push_back(std::move(layer));
  }
  return graph;
}

/// The objective minimized by `arrange_optimal`, evaluated on a piece's own
/// positions: fingering costs of every note group plus transition costs
/// between consecutive groups. For monophonic pieces this is the sum of
/// pairwise transition difficulties.
inline double arrangement_cost(const Piece& piece, const DifficultyParams& params = {}) {
  Piece sorted = piece;
  std::stable_sort(sorted.notes.begin(), sorted.notes.end(),
                   [](const NoteEvent& a, const NoteEvent& b) { return a.start < b.start; });
  double total = 0.0;
  std::optional<Fingering> previous;
  for (const NoteGroup& g : note_groups(sorted.notes)) {
    Fingering f;
    for (std::size_t i = g.begin; i < g.end; ++i) {
      if (!sorted.notes[i].position) throw DomainError("note " + std::to_string(i) + " has no position");
      f.positions.push_back(*sorted.notes[i].position);
    }
    total += fingering_cost(f, params);
    if (previous) total += fingering_transition_cost(*previous, f, params);
    previous = std::move(f);
  }
  return total;
}

/// Lowest-fret baseline: every note takes its first candidate position; a
/// chord note whose string is taken moves to its next candidate on a free
/// string. Chord notes are placed from the lowest pitch up.
inline Piece arrange_baseline(const Piece& piece, const GuitarConfig& config) {
  Piece out = detail::arrangement_input(piece, config);
  detail::check_playable(out);
  const auto groups = note_groups(out.notes);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const NoteGroup group = groups[g];
    if (group.size() > static_cast<std::size_t>(kNumStrings)) {
      throw DomainError("infeasible chord at " + detail::at_step(g, out.notes[group.begin].start) + ": " +
                        std::to_string(group.size()) + " simultaneous notes");
    }
    unsigned used = 0;
    bool placed = true;
    for (std::size_t i = group.begin; i < group.end && placed; ++i) {
      placed = false;
      for (const Position& p : candidate_positions(config, out.notes[i].pitch)) {
        if (used & (1u << p.string)) continue;
        out.notes[i].position = p;
        used |= 1u << p.string;
        placed = true;
        break;
      }
    }
    if (!placed) {
      // greedy placement painted itself into a corner; take the first
      // collision-free fingering instead
      std::vector<Pitch> pitches;
      for (std::size_t i = group.begin; i < group.end; ++i) pitches.push_back(out.notes[i].pitch);
      const auto options = chord_fingerings(config, pitches, false);
      if (options.empty()) {
        throw DomainError("infeasible chord at " + detail::at_step(g, out.notes[group.begin].start) +
                          ": no collision-free fingering");
      }
      for (std::size_t i = group.begin; i < group.end; ++i) out.notes[i].position = options.front().positions[i - group.begin];
    }
  }
  out.sort_notes();
  return out;
}

/// Minimum-cost path through the layered fingering graph (exact shortest path
/// on a DAG, i.e. A* with a zero heuristic). Among optimal paths the one with
/// the lexicographically smallest (fret, string) sequence wins.
/// `fixed_first` pins the first note group to a given fingering; chunked
/// arrangement uses it to carry the previous chunk's last decision.
inline Piece arrange_optimal(const Piece& piece, const GuitarConfig& config, const DifficultyParams& params = {},
                             const std::optional<Fingering>& fixed_first = std::nullopt) {
  params.validate();
  Piece out = detail::arrangement_input(piece, config);
  if (out.notes.empty()) return out;
  detail::check_playable(out);
  LayeredGraph graph = build_layered_graph(out);
  if (fixed_first) {
    if (fixed_first->positions.size() != graph.groups.front().size()) {
      throw AlignmentError(graph.groups.front().size(), fixed_first->positions.size(),
                           "fixed fingering does not match the first note group");
    }
    graph.layers.front() = {*fixed_first};
  }

  constexpr double kTie = 1e-9;
  const std::size_t n_layers = graph.layers.size();
  std::vector<std::vector<double>> node_cost(n_layers);
  std::vector<std::vector<double>> to_go(n_layers);
  for (std::size_t l = 0; l < n_layers; ++l) {
    for (const auto& f : graph.layers[l]) node_cost[l].push_back(fingering_cost(f, params));
  }
  to_go[n_layers - 1] = node_cost[n_layers - 1];
  for (std::size_t l = n_layers - 1; l-- > 0;) {
    const auto& here = graph.layers[l];
    const auto& next = graph.layers[l + 1];
    to_go[l].assign(here.size(), std::numeric_limits<double>::infinity());
    for (std::size_t a = 0; a < here.size(); ++a) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t b = 0; b < next.size(); ++b) {
        best = std::min(best, fingering_transition_cost(here[a], next[b], params) + to_go[l + 1][b]);
      }
      to_go[l][a] = node_cost[l][a] + best;
    }
  }

  // forward walk: first (smallest-key) node that stays on an optimal path
  std::vector<std::size_t> choice(n_layers);
  const double optimum = *std::min_element(to_go[0].begin(), to_go[0].end());
  for (std::size_t a = 0; a < to_go[0].size(); ++a) {
    if (to_go[0][a] <= optimum + kTie) {
      choice[0] = a;
      break;
    }
  }
  for (std::size_t l = 0; l + 1 < n_layers; ++l) {
    const std::size_t a = choice[l];
    const double remaining = to_go[l][a] - node_cost[l][a];
    const auto& next = graph.layers[l + 1];
    for (std::size_t b = 0; b < next.size(); ++b) {
      if (fingering_transition_cost(graph.layers[l][a], next[b], params) + to_go[l + 1][b] <= remaining + kTie) {
        choice[l + 1] = b;
        break;
      }
    }
  }

  for (std::size_t l = 0; l < n_layers; ++l) {
    const NoteGroup g = graph.groups[l];
    const Fingering& f = graph.layers[l][choice[l]];
    for (std::size_t i = g.begin; i < g.end; ++i) out.notes[i].position = f.positions[i - g.begin];
  }
  out.sort_notes();
  return out;
}

}  // namespace fretting
