#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "fretting/fretting.hpp"

namespace fretting::testing {

inline int rand_int(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

inline NoteEvent note(Tick start, Tick end, int pitch) { return {start, end, Pitch(pitch), std::nullopt}; }

inline NoteEvent note(Tick start, Tick end, int pitch, int string, int fret) {
  return {start, end, Pitch(pitch), Position{string, fret}};
}

inline Piece make_piece(std::vector<NoteEvent> notes, GuitarConfig config = {}) {
  Piece p;
  p.config = config;
  p.notes = std::move(notes);
  p.sort_notes();
  return p;
}

/// Annotated piece on the 10-tick grid with at most `voices` notes sounding at
/// once and no two overlapping notes of the same pitch.
inline Piece random_polyphonic_piece(std::mt19937_64& rng, int max_notes = 64, int voices = 4) {
  const GuitarConfig config;
  Piece piece;
  piece.config = config;
  const int target = rand_int(rng, 1, max_notes);
  Tick t = 0;
  int attempts = 0;
  while (static_cast<int>(piece.notes.size()) < target && attempts < 20 * max_notes) {
    ++attempts;
    if (rand_int(rng, 0, 2) == 0) t += 10 * rand_int(rng, 1, 250);
    const Tick start = t;
    const Tick end = start + 10 * rand_int(rng, 1, 250);
    const int pitch = rand_int(rng, 40, 88);
    int sounding = 0;
    bool clash = false;
    for (const auto& n : piece.notes) {
      const bool overlap = n.start < end && start < n.end;
      if (overlap) {
        ++sounding;
        if (n.pitch.midi() == pitch) clash = true;
      }
    }
    if (clash || sounding >= voices) continue;
    const auto candidates = candidate_positions(config, Pitch(pitch));
    const Position pos = candidates[uniform_below(rng, candidates.size())];
    piece.notes.push_back({start, end, Pitch(pitch), pos});
  }
  piece.sort_notes();
  return piece;
}

/// Unannotated single-voice piece of quarter notes.
inline Piece random_monophonic_piece(std::mt19937_64& rng, int length, int lo = 40, int hi = 88) {
  Piece piece;
  for (int i = 0; i < length; ++i) piece.notes.push_back(note(480 * i, 480 * (i + 1), rand_int(rng, lo, hi)));
  return piece;
}

/// Unannotated piece of chords drawn as frets 0..4 on distinct strings, so
/// every group has a playable fingering within the chord span.
inline Piece random_chord_piece(std::mt19937_64& rng, int max_notes = 64) {
  const GuitarConfig config;
  Piece piece;
  const int target = rand_int(rng, 1, max_notes);
  Tick t = 0;
  while (static_cast<int>(piece.notes.size()) < target) {
    const int size = std::min(rand_int(rng, 1, 4), target - static_cast<int>(piece.notes.size()));
    std::vector<int> strings = {1, 2, 3, 4, 5, 6};
    for (int i = 5; i > 0; --i) std::swap(strings[i], strings[uniform_below(rng, i + 1)]);
    for (int k = 0; k < size; ++k) {
      const Pitch p = sounding_pitch(config, {strings[k], rand_int(rng, 0, 4)});
      piece.notes.push_back({t, t + 240, p, std::nullopt});
    }
    t += 240;
  }
  piece.sort_notes();
  return piece;
}

/// Exhaustive minimum of the summed transition difficulty over every
/// assignment of candidate positions to a monophonic pitch sequence.
inline double brute_force_min_cost(const std::vector<Pitch>& pitches, const GuitarConfig& config,
                                   const DifficultyParams& params = {}) {
  std::vector<std::vector<Position>> cands;
  for (Pitch p : pitches) cands.push_back(candidate_positions(config, p));
  std::vector<std::size_t> idx(pitches.size(), 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    double cost = 0.0;
    for (std::size_t i = 1; i < idx.size(); ++i) cost += transition_difficulty(cands[i - 1][idx[i - 1]], cands[i][idx[i]], params);
    best = std::min(best, cost);
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == cands[k].size()) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  return best;
}

/// Minimal Standard MIDI File writer for fixtures.
class SmfBuilder {
 public:
  explicit SmfBuilder(int ppq = 480, int format = 1) : ppq_(ppq), format_(format) {}

  class Track {
   public:
    Track& name(const std::string& text) {
      delta(0);
      bytes_.insert(bytes_.end(), {0xFF, 0x03});
      varlen(text.size());
      bytes_.insert(bytes_.end(), text.begin(), text.end());
      return *this;
    }
    Track& program(int channel, int wire_program, std::uint32_t dt = 0) {
      delta(dt);
      bytes_.push_back(static_cast<std::uint8_t>(0xC0 | channel));
      bytes_.push_back(static_cast<std::uint8_t>(wire_program));
      return *this;
    }
    Track& on(int channel, int pitch, std::uint32_t dt = 0, int velocity = 100) {
      delta(dt);
      bytes_.push_back(static_cast<std::uint8_t>(0x90 | channel));
      bytes_.push_back(static_cast<std::uint8_t>(pitch));
      bytes_.push_back(static_cast<std::uint8_t>(velocity));
      return *this;
    }
    Track& off(int channel, int pitch, std::uint32_t dt = 0) {
      delta(dt);
      bytes_.push_back(static_cast<std::uint8_t>(0x80 | channel));
      bytes_.push_back(static_cast<std::uint8_t>(pitch));
      bytes_.push_back(0x40);
      return *this;
    }
    Track& raw(std::uint32_t dt, std::initializer_list<std::uint8_t> data) {
      delta(dt);
      bytes_.insert(bytes_.end(), data);
      return *this;
    }

   private:
    friend class SmfBuilder;
    void delta(std::uint32_t v) { varlen(v); }
    void varlen(std::uint32_t v) {
      std::uint8_t buf[5];
      int n = 0;
      buf[n++] = v & 0x7F;
      while (v >>= 7) buf[n++] = static_cast<std::uint8_t>(0x80 | (v & 0x7F));
      while (n) bytes_.push_back(buf[--n]);
    }
    std::vector<std::uint8_t> bytes_;
  };

  Track& track() { return tracks_.emplace_back(); }

  std::vector<std::uint8_t> bytes() const {
    std::vector<std::uint8_t> out = {'M', 'T', 'h', 'd', 0, 0, 0, 6};
    put16(out, format_);
    put16(out, tracks_.size());
    put16(out, ppq_);
    for (const auto& t : tracks_) {
      std::vector<std::uint8_t> body = t.bytes_;
      body.insert(body.end(), {0x00, 0xFF, 0x2F, 0x00});
      out.insert(out.end(), {'M', 'T', 'r', 'k'});
      put32(out, body.size());
      out.insert(out.end(), body.begin(), body.end());
    }
    return out;
  }

 private:
  static void put16(std::vector<std::uint8_t>& out, std::size_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
  }
  static void put32(std::vector<std::uint8_t>& out, std::size_t v) {
    for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
  }

  int ppq_;
  int format_;
  std::vector<Track> tracks_;
};

/// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("fretting-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

/// Runs a shell command, capturing stdout and stderr together.
inline CommandResult run_command(const std::string& command) {
  CommandResult result;
  FILE* pipe = ::popen((command + " 2>&1").c_str(), "r");
  if (!pipe) throw IoError("cannot run " + command);
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) result.output.append(buf, n);
  const int status = ::pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

}  // namespace fretting::testing
