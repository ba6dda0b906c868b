#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "fretting/errors.hpp"

namespace fretting {

inline constexpr int kNumStrings = 6;
inline constexpr int kDefaultFrets = 24;
inline constexpr int kMaxCapo = 7;

using Tick = std::int64_t;

/// MIDI note number, 0..127 (60 = C4).
class Pitch {
 public:
  constexpr Pitch() = default;
  explicit constexpr Pitch(int midi) : value_(checked(midi)) {}

  constexpr int midi() const noexcept { return value_; }

  constexpr Pitch operator+(int semitones) const { return Pitch{value_ + semitones}; }
  constexpr Pitch operator-(int semitones) const { return Pitch{value_ - semitones}; }
  constexpr int operator-(Pitch other) const noexcept { return value_ - other.value_; }

  constexpr auto operator<=>(const Pitch&) const = default;

  static constexpr bool valid(int midi) noexcept { return midi >= 0 && midi <= 127; }

 private:
  static constexpr int checked(int midi) {
    if (!valid(midi)) throw DomainError("pitch out of MIDI range: " + std::to_string(midi));
    return midi;
  }

  int value_ = 60;
};

enum class TuningName { standard, half_step_down, full_step_down, drop_d, custom };

inline std::string_view to_string(TuningName name) {
  switch (name) {
    case TuningName::standard: return "standard";
    case TuningName::half_step_down: return "half-step-down";
    case TuningName::full_step_down: return "full-step-down";
    case TuningName::drop_d: return "drop-d";
    case TuningName::custom: return "custom";
  }
  return "custom";
}

/// Open-string pitches, index 0 is string 1 (the highest-pitched string).
struct Tuning {
  std::array<Pitch, kNumStrings> open{};
  TuningName name = TuningName::custom;

  Pitch open_pitch(int string) const { return open.at(static_cast<std::size_t>(string - 1)); }

  bool operator==(const Tuning&) const = default;

  static Tuning standard() {
    return {{Pitch{64}, Pitch{59}, Pitch{55}, Pitch{50}, Pitch{45}, Pitch{40}}, TuningName::standard};
  }
  static Tuning half_step_down() { return shifted(standard(), {-1, -1, -1, -1, -1, -1}, TuningName::half_step_down); }
  static Tuning full_step_down() { return shifted(standard(), {-2, -2, -2, -2, -2, -2}, TuningName::full_step_down); }
  static Tuning drop_d() { return shifted(standard(), {0, 0, 0, 0, 0, -2}, TuningName::drop_d); }

  /// Builds a tuning from raw pitches; recognises the four named tunings.
  static Tuning from_pitches(const std::array<int, kNumStrings>& midi) {
    Tuning t;
    for (std::size_t i = 0; i < t.open.size(); ++i) t.open[i] = Pitch{midi[i]};
    for (const Tuning& known : {standard(), half_step_down(), full_step_down(), drop_d()}) {
      if (known.open == t.open) return known;
    }
    t.name = TuningName::custom;
    return t;
  }

  static std::optional<Tuning> by_name(std::string_view name) {
    for (const Tuning& known : {standard(), half_step_down(), full_step_down(), drop_d()}) {
      if (to_string(known.name) == name) return known;
    }
    return std::nullopt;
  }

 private:
  static Tuning shifted(Tuning base, const std::array<int, kNumStrings>& delta, TuningName name) {
    for (std::size_t i = 0; i < base.open.size(); ++i) base.open[i] = base.open[i] + delta[i];
    base.name = name;
    return base;
  }
};

struct GuitarConfig {
  Tuning tuning = Tuning::standard();
  int capo = 0;
  int num_frets = kDefaultFrets;

  /// Highest playable fret counted from the capo.
  int max_fret() const noexcept { return num_frets - capo; }

  bool operator==(const GuitarConfig&) const = default;

  void validate() const {
    if (num_frets < 1) throw DomainError("num_frets must be >= 1");
    if (capo < 0 || capo >= num_frets)
      throw DomainError("capo out of range: " + std::to_string(capo));
  }
};

/// String 1..6 (1 = highest pitched); fret counted relative to the capo.
struct Position {
  int string = 1;
  int fret = 0;

  auto operator<=>(const Position&) const = default;
};

inline bool is_valid(const GuitarConfig& config, Position pos) noexcept {
  return pos.string >= 1 && pos.string <= kNumStrings && pos.fret >= 0 &&
         pos.fret <= config.max_fret();
}

inline Pitch sounding_pitch(const GuitarConfig& config, Position pos) {
  if (!is_valid(config, pos)) {
    throw DomainError("invalid position (string " + std::to_string(pos.string) + ", fret " +
                      std::to_string(pos.fret) + ")");
  }
  return config.tuning.open_pitch(pos.string) + (config.capo + pos.fret);
}

/// All positions sounding `pitch`, ordered by (fret, string). Empty when unplayable.
inline std::vector<Position> candidate_positions(const GuitarConfig& config, Pitch pitch) {
  std::vector<Position> out;
  for (int string = 1; string <= kNumStrings; ++string) {
    const int fret = pitch.midi() - config.tuning.open_pitch(string).midi() - config.capo;
    if (fret >= 0 && fret <= config.max_fret()) out.push_back({string, fret});
  }
  std::sort(out.begin(), out.end(), [](Position a, Position b) {
    return std::tie(a.fret, a.string) < std::tie(b.fret, b.string);
  });
  return out;
}

struct NoteEvent {
  Tick start = 0;
  Tick end = 0;
  Pitch pitch;
  std::optional<Position> position;

  bool operator==(const NoteEvent&) const = default;
};

/// Canonical note order: (start, string-if-present, pitch, end).
inline bool canonical_less(const NoteEvent& a, const NoteEvent& b) {
  const int sa = a.position ? a.position->string : 0;
  const int sb = b.position ? b.position->string : 0;
  const int fa = a.position ? a.position->fret : -1;
  const int fb = b.position ? b.position->fret : -1;
  return std::tie(a.start, sa, a.pitch, a.end, fa) < std::tie(b.start, sb, b.pitch, b.end, fb);
}

struct Piece {
  GuitarConfig config;
  int ppq = 480;
  std::vector<NoteEvent> notes;
  std::string source_id;

  bool operator==(const Piece&) const = default;

  bool annotated() const {
    return std::all_of(notes.begin(), notes.end(), [](const NoteEvent& n) { return n.position.has_value(); });
  }

  void sort_notes() { std::stable_sort(notes.begin(), notes.end(), canonical_less); }

  bool is_sorted() const { return std::is_sorted(notes.begin(), notes.end(), canonical_less); }

  Tick end_time() const {
    Tick end = 0;
    for (const auto& n : notes) end = std::max(end, n.end);
    return end;
  }

  Piece without_positions() const {
    Piece out = *this;
    for (auto& n : out.notes) n.position.reset();
    out.sort_notes();
    return out;
  }
};

/// Checks the structural invariants of a piece; with `check_pitches`, every
/// present position must also sound the note's pitch.
inline void validate(const Piece& piece, bool check_pitches = true) {
  piece.config.validate();
  if (piece.ppq <= 0) throw DomainError("ppq must be positive");
  for (std::size_t i = 0; i < piece.notes.size(); ++i) {
    const auto& n = piece.notes[i];
    if (n.end <= n.start) throw DomainError("note " + std::to_string(i) + " has non-positive duration");
    if (n.position && check_pitches && sounding_pitch(piece.config, *n.position) != n.pitch) {
      throw DomainError("note " + std::to_string(i) + " position does not sound pitch " +
                        std::to_string(n.pitch.midi()));
    }
  }
  if (!piece.is_sorted()) throw DomainError("notes are not in canonical order");
}

/// Notes sharing a start tick, as index ranges into `Piece::notes`.
struct NoteGroup {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
};

inline std::vector<NoteGroup> note_groups(const std::vector<NoteEvent>& notes) {
  std::vector<NoteGroup> groups;
  for (std::size_t i = 0; i < notes.size(); ++i) {
    if (groups.empty() || notes[groups.back().begin].start != notes[i].start) {
      groups.push_back({i, i + 1});
    } else {
      groups.back().end = i + 1;
    }
  }
  return groups;
}

}  // namespace fretting
