#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "fretting/core.hpp"
#include "fretting/difficulty.hpp"

namespace fretting {

/// Note indices in timing order: (start, pitch, end), stable. Used to align
/// two versions of the same piece independently of their positions.
inline std::vector<std::size_t> timing_order(const Piece& piece) {
  std::vector<std::size_t> idx(piece.notes.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = piece.notes[a];
    const auto& y = piece.notes[b];
    return std::tie(x.start, x.pitch, x.end) < std::tie(y.start, y.pitch, y.end);
  });
  return idx;
}

namespace detail {

inline bool overlaps(const NoteEvent& a, const NoteEvent& b) { return a.start < b.end && b.start < a.end; }

inline bool string_free(const std::vector<NoteEvent>& notes, std::size_t self, int string) {
  for (std::size_t k = 0; k < notes.size(); ++k) {
    if (k == self || !notes[k].position || notes[k].position->string != string) continue;
    if (overlaps(notes[k], notes[self])) return false;
  }
  return true;
}

/// Cheapest candidate for note `j` on a string no overlapping note uses,
/// costed by transitions from the previous and into the next note.
inline std::optional<Position> free_alternative(const Piece& piece, std::size_t j, const DifficultyParams& params) {
  const auto& notes = piece.notes;
  auto neighbour = [&](std::size_t k) -> std::optional<Position> {
    if (k >= notes.size() || !notes[k].position || !is_valid(piece.config, *notes[k].position)) return std::nullopt;
    return notes[k].position;
  };
  const auto prev = j > 0 ? neighbour(j - 1) : std::nullopt;
  const auto next = neighbour(j + 1);

  std::optional<Position> best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (const Position& cand : candidate_positions(piece.config, notes[j].pitch)) {
    if (notes[j].position && cand == *notes[j].position) continue;
    if (!string_free(notes, j, cand.string)) continue;
    double cost = 0.0;
    if (prev) cost += transition_difficulty(*prev, cand, params);
    if (next) cost += transition_difficulty(cand, *next, params);
    if (cost < best_cost) {
      best_cost = cost;
      best = cand;
    }
  }
  return best;
}

}  // namespace detail

/// Repairs same-string collisions: when a note starts on a string still
/// ringing from an earlier note, the later note moves to its cheapest
/// alternative position on a free string. Without one, the earlier note is cut
/// off where the later begins. Two notes starting together on one string with
/// no free alternative for either are left as they are.
inline Piece postprocess_overlap(const Piece& piece, const DifficultyParams& params = {}) {
  Piece out = piece;
  out.sort_notes();
  auto& notes = out.notes;
  for (std::size_t j = 0; j < notes.size(); ++j) {
    if (!notes[j].position) continue;
    std::vector<std::size_t> colliding;
    for (std::size_t i = 0; i < j; ++i) {
      if (notes[i].position && notes[i].position->string == notes[j].position->string && notes[i].end > notes[j].start) {
        colliding.push_back(i);
      }
    }
    if (colliding.empty()) continue;

    if (auto alt = detail::free_alternative(out, j, params)) {
      notes[j].position = alt;
      continue;
    }
    for (std::size_t i : colliding) {
      if (notes[i].start < notes[j].start) {
        notes[i].end = notes[j].start;
      } else if (auto alt_i = detail::free_alternative(out, i, params)) {
        notes[i].position = alt_i;
      }
    }
  }
  out.sort_notes();
  return out;
}

/// Restores one position per input note with the input's pitch. For input
/// note i (timing order) the estimated notes i, i-1, i+1, ..., i-window,
/// i+window are tried in turn; the first unused one whose position sounds the
/// input pitch donates it. Otherwise the note gets its first candidate
/// position under `config`.
inline Piece postprocess_neighbor_search(const Piece& input, const Piece& estimated, const GuitarConfig& config,
                                         std::size_t window = 5) {
  config.validate();
  Piece out = input;
  out.config = config;
  const auto in_order = timing_order(input);
  const auto est_order = timing_order(estimated);
  std::vector<bool> used(est_order.size(), false);

  auto donor_matches = [&](std::size_t e, Pitch pitch) {
    const auto& pos = estimated.notes[est_order[e]].position;
    return pos && is_valid(config, *pos) && sounding_pitch(config, *pos) == pitch;
  };

  for (std::size_t i = 0; i < in_order.size(); ++i) {
    NoteEvent& note = out.notes[in_order[i]];
    std::optional<Position> found;
    for (std::size_t d = 0; d <= window && !found; ++d) {
      for (int sign : {-1, +1}) {
        if (d == 0 && sign > 0) break;
        if (sign < 0 && d > i) continue;
        const std::size_t e = sign < 0 ? i - d : i + d;
        if (e >= est_order.size() || used[e] || !donor_matches(e, note.pitch)) continue;
        used[e] = true;
        found = estimated.notes[est_order[e]].position;
        break;
      }
    }
    if (!found) {
      const auto candidates = candidate_positions(config, note.pitch);
      if (candidates.empty()) {
        throw DomainError("note " + std::to_string(in_order[i]) + " (pitch " + std::to_string(note.pitch.midi()) +
                          ") is unplayable under this guitar configuration");
      }
      found = candidates.front();
    }
    note.position = found;
  }
  out.sort_notes();
  return out;
}

}  // namespace fretting
