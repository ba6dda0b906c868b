#pragma once

#include <cstdlib>
#include <vector>

#include "fretting/core.hpp"

namespace fretting {

/// Weights of the pairwise playability cost. Defaults reproduce the published
/// model: the cost ranges from 0 (repeated open string) to 18.5 for an
/// ascending jump from the low open string to fret 24 on string 1.
struct DifficultyParams {
  double alpha = 0.25;
  double ascending_fret_weight = 0.50;
  double descending_fret_weight = 0.75;
  double near_string_cost = 0.25;
  double far_string_cost = 0.50;

  void validate() const {
    if (alpha < 0 || ascending_fret_weight < 0 || descending_fret_weight < 0 ||
        near_string_cost < 0 || far_string_cost < 0) {
      throw DomainError("difficulty parameters must be non-negative");
    }
  }
};

/// Horizontal movement cost; moving up the neck is cheaper than moving down.
inline double fret_stretch(int from_fret, int to_fret, const DifficultyParams& params = {}) {
  const int delta = to_fret - from_fret;
  return delta > 0 ? params.ascending_fret_weight * delta
                   : params.descending_fret_weight * std::abs(delta);
}

/// Penalty for playing high on the neck.
inline double locality(int from_fret, int to_fret, double alpha) {
  return alpha * (from_fret + to_fret);
}

inline double locality(int from_fret, int to_fret, const DifficultyParams& params = {}) {
  return locality(from_fret, to_fret, params.alpha);
}

/// Cost of moving across strings. Staying on a string is free.
inline double vertical_stretch(int from_string, int to_string, const DifficultyParams& params = {}) {
  const int delta = std::abs(to_string - from_string);
  if (delta == 0) return 0.0;
  return delta == 1 ? params.near_string_cost : params.far_string_cost;
}

inline double transition_difficulty(Position from, Position to, const DifficultyParams& params = {}) {
  const double along = fret_stretch(from.fret, to.fret, params) + locality(from.fret, to.fret, params);
  const double across = vertical_stretch(from.string, to.string, params);
  return along + across;
}

/// Positions of a piece in difficulty order: ascending start, then string.
inline std::vector<Position> difficulty_order(const Piece& piece) {
  std::vector<const NoteEvent*> ordered;
  ordered.reserve(piece.notes.size());
  for (std::size_t i = 0; i < piece.notes.size(); ++i) {
    if (!piece.notes[i].position) {
      throw DomainError("note " + std::to_string(i) + " has no position");
    }
    ordered.push_back(&piece.notes[i]);
  }
  std::stable_sort(ordered.begin(), ordered.end(), [](const NoteEvent* a, const NoteEvent* b) {
    return std::tie(a->start, a->position->string) < std::tie(b->start, b->position->string);
  });
  std::vector<Position> out;
  out.reserve(ordered.size());
  for (const auto* n : ordered) out.push_back(*n->position);
  return out;
}

/// Sum of transition costs over consecutive positions in difficulty order.
inline double total_transition_difficulty(const Piece& piece, const DifficultyParams& params = {}) {
  const auto positions = difficulty_order(piece);
  double total = 0.0;
  for (std::size_t i = 1; i < positions.size(); ++i) {
    total += transition_difficulty(positions[i - 1], positions[i], params);
  }
  return total;
}

/// Mean transition cost of a tablature; 0 for fewer than two notes.
inline double piece_difficulty(const Piece& piece, const DifficultyParams& params = {}) {
  const std::size_t n = piece.notes.size();
  const double total = total_transition_difficulty(piece, params);
  return n < 2 ? 0.0 : total / static_cast<double>(n - 1);
}

}  // namespace fretting
