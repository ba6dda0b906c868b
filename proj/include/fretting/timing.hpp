#pragma once

#include "fretting/core.hpp"

namespace fretting {

/// All token timing is expressed at this resolution.
inline constexpr int kCanonicalPpq = 480;
/// TIME_SHIFT values are multiples of this many canonical ticks.
inline constexpr Tick kTickGrid = 10;
/// Longest single TIME_SHIFT; longer gaps repeat the token.
inline constexpr Tick kMaxTimeShift = 1920;

inline Tick rescale_tick(Tick t, int from_ppq, int to_ppq) {
  // round half up, t >= 0
  return (t * to_ppq * 2 + from_ppq) / (2 * static_cast<Tick>(from_ppq));
}

inline Tick snap_to_grid(Tick t) { return (t + kTickGrid / 2) / kTickGrid * kTickGrid; }

inline bool on_canonical_grid(const Piece& piece) {
  if (piece.ppq != kCanonicalPpq) return false;
  for (const auto& n : piece.notes) {
    if (n.start % kTickGrid != 0 || n.end % kTickGrid != 0) return false;
  }
  return true;
}

/// Rescales a piece to the canonical PPQ and snaps note boundaries to the tick
/// grid. Notes collapsing to zero length keep one grid step.
inline Piece normalize_timing(const Piece& piece) {
  if (piece.ppq <= 0) throw DomainError("ppq must be positive");
  Piece out = piece;
  out.ppq = kCanonicalPpq;
  for (auto& n : out.notes) {
    n.start = snap_to_grid(rescale_tick(n.start, piece.ppq, kCanonicalPpq));
    n.end = snap_to_grid(rescale_tick(n.end, piece.ppq, kCanonicalPpq));
    if (n.end <= n.start) n.end = n.start + kTickGrid;
  }
  out.sort_notes();
  return out;
}

}  // namespace fretting
