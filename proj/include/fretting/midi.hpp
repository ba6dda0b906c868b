#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "fretting/core.hpp"
#include "fretting/timing.hpp"

namespace fretting {

/// Selects guitar tracks. Programs are General MIDI numbers in 1-based
/// numbering (25 = nylon, 26 = steel); the file stores them 0-based.
struct FilterSpec {
  std::set<int> programs = {25, 26};
  std::vector<std::string> keywords = default_keywords();

  static std::vector<std::string> default_keywords() {
    return {"guitar", "guitarra", "gitarre", "guitare", "violão", "acoustic"};
  }
};

namespace detail {

inline std::string ascii_lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t offset() const noexcept { return pos_; }
  bool done() const noexcept { return pos_ >= bytes_.size(); }
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

  std::uint8_t u8() {
    need(1);
    return bytes_[pos_++];
  }
  std::uint8_t peek() {
    need(1);
    return bytes_[pos_];
  }
  std::uint16_t u16() {
    const auto hi = u8();
    return static_cast<std::uint16_t>((hi << 8) | u8());
  }
  std::uint32_t u32() {
    const std::uint32_t hi = u16();
    return (hi << 16) | u16();
  }
  std::uint32_t varlen() {
    const std::size_t start = pos_;
    std::uint32_t value = 0;
    for (int i = 0; i < 4; ++i) {
      const auto b = u8();
      value = (value << 7) | (b & 0x7Fu);
      if ((b & 0x80u) == 0) return value;
    }
    throw FormatError("variable-length quantity longer than 4 bytes at offset " + std::to_string(start), start);
  }
  std::string text(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  void skip(std::size_t n) {
    need(n);
    pos_ += n;
  }
  ByteReader sub(std::size_t n) {
    need(n);
    ByteReader r(bytes_.subspan(pos_, n));
    r.base_ = base_ + pos_;
    pos_ += n;
    return r;
  }
  std::size_t absolute() const noexcept { return base_ + pos_; }

 private:
  void need(std::size_t n) const {
    if (remaining() < n) {
      throw FormatError("unexpected end of data at offset " + std::to_string(base_ + pos_), base_ + pos_);
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  std::size_t base_ = 0;
};

enum class MidiEventKind { note_off = 0, program = 1, note_on = 2 };

struct MidiEvent {
  Tick tick = 0;
  int channel = 0;
  MidiEventKind kind = MidiEventKind::note_on;
  int data = 0;  // pitch or program
};

struct MidiTrack {
  std::string name;
  std::vector<MidiEvent> events;
  Tick end_tick = 0;
};

inline MidiTrack read_track(ByteReader r) {
  MidiTrack track;
  Tick tick = 0;
  int running = -1;
  while (!r.done()) {
    tick += r.varlen();
    const std::size_t at = r.absolute();
    int status = r.peek();
    if (status & 0x80) {
      r.u8();
    } else if (running < 0) {
      throw FormatError("data byte without running status at offset " + std::to_string(at), at);
    } else {
      status = running;
    }

    if (status == 0xFF) {
      const int type = r.u8();
      const auto len = r.varlen();
      if (type == 0x03 && track.name.empty()) {
        track.name = r.text(len);
      } else {
        r.skip(len);
      }
      if (type == 0x2F) {
        track.end_tick = tick;
        break;
      }
      continue;
    }
    if (status == 0xF0 || status == 0xF7) {
      r.skip(r.varlen());
      running = -1;
      continue;
    }
    if (status >= 0xF0) throw FormatError("unsupported system message at offset " + std::to_string(at), at);

    running = status;
    const int type = status & 0xF0;
    const int channel = status & 0x0F;
    const int data_bytes = (type == 0xC0 || type == 0xD0) ? 1 : 2;
    std::array<int, 2> data{0, 0};
    for (int i = 0; i < data_bytes; ++i) {
      const std::size_t data_at = r.absolute();
      data[static_cast<std::size_t>(i)] = r.u8();
      if (data[static_cast<std::size_t>(i)] & 0x80) {
        throw FormatError("status byte where data byte expected at offset " + std::to_string(data_at), data_at);
      }
    }
    if (type == 0x90 && data[1] > 0) {
      track.events.push_back({tick, channel, MidiEventKind::note_on, data[0]});
    } else if (type == 0x80 || type == 0x90) {
      track.events.push_back({tick, channel, MidiEventKind::note_off, data[0]});
    } else if (type == 0xC0) {
      track.events.push_back({tick, channel, MidiEventKind::program, data[0]});
    }
  }
  track.end_tick = std::max(track.end_tick, tick);
  return track;
}

inline bool matches_keyword(const std::string& name, const std::vector<std::string>& keywords) {
  const std::string lowered = ascii_lower(name);
  return std::any_of(keywords.begin(), keywords.end(), [&](const std::string& k) {
    return !k.empty() && lowered.find(ascii_lower(k)) != std::string::npos;
  });
}

}  // namespace detail

/// Parses a type-0/1 Standard MIDI File into an unannotated piece in
/// standard tuning. Timing is normalized to the canonical PPQ and tick grid.
/// A (track, channel) contributes notes when the channel selects one of the
/// filter's programs or the track name contains a filter keyword.
inline Piece parse_midi(std::span<const std::uint8_t> bytes, const FilterSpec& filter = {}) {
  detail::ByteReader r(bytes);
  if (r.remaining() < 14 || r.text(4) != "MThd") throw FormatError("missing MThd header at offset 0", 0);
  const auto header_len = r.u32();
  if (header_len < 6) throw FormatError("MThd chunk too short at offset 4", 4);
  auto header = r.sub(header_len);
  const int format = header.u16();
  const int declared_tracks = header.u16();
  const int division = header.u16();
  if (format > 1) throw FormatError("unsupported SMF format " + std::to_string(format) + " at offset 8", 8);
  if (division & 0x8000) throw FormatError("SMPTE time division is not supported at offset 12", 12);
  if (division == 0) throw FormatError("zero ticks per quarter note at offset 12", 12);

  std::vector<detail::MidiTrack> tracks;
  while (!r.done() && static_cast<int>(tracks.size()) < declared_tracks) {
    const std::size_t at = r.absolute();
    const std::string id = r.text(4);
    const auto len = r.u32();
    if (len > r.remaining()) throw FormatError("chunk length exceeds file size at offset " + std::to_string(at), at);
    auto body = r.sub(len);
    if (id == "MTrk") tracks.push_back(detail::read_track(body));
  }
  if (static_cast<int>(tracks.size()) < declared_tracks) {
    throw FormatError("expected " + std::to_string(declared_tracks) + " tracks, found " +
                          std::to_string(tracks.size()), r.absolute());
  }

  Piece piece;
  piece.ppq = division;
  bool any_passed = false;
  for (auto& track : tracks) {
    const bool name_match = detail::matches_keyword(track.name, filter.keywords);
    std::set<int> passing_channels;
    std::set<int> used_channels;
    for (const auto& e : track.events) {
      used_channels.insert(e.channel);
      if (e.kind == detail::MidiEventKind::program && filter.programs.count(e.data + 1)) {
        passing_channels.insert(e.channel);
      }
    }
    if (name_match) passing_channels = used_channels;
    if (passing_channels.empty()) continue;
    any_passed = true;

    // off < program < on within a tick, so the result is independent of the
    // order of simultaneous events in the file
    std::stable_sort(track.events.begin(), track.events.end(), [](const auto& a, const auto& b) {
      return std::tie(a.tick, a.kind) < std::tie(b.tick, b.kind);
    });
    std::map<std::pair<int, int>, std::deque<Tick>> open;
    for (const auto& e : track.events) {
      if (!passing_channels.count(e.channel)) continue;
      auto key = std::make_pair(e.channel, e.data);
      if (e.kind == detail::MidiEventKind::note_on) {
        open[key].push_back(e.tick);
      } else if (e.kind == detail::MidiEventKind::note_off) {
        auto it = open.find(key);
        if (it == open.end() || it->second.empty()) continue;
        const Tick start = it->second.front();
        it->second.pop_front();
        if (e.tick > start) piece.notes.push_back({start, e.tick, Pitch{e.data}, std::nullopt});
      }
    }
    for (auto& [key, starts] : open) {
      for (const Tick start : starts) {
        if (track.end_tick > start) piece.notes.push_back({start, track.end_tick, Pitch{key.second}, std::nullopt});
      }
    }
  }
  if (!any_passed) throw DomainError("empty piece: no track passes the guitar filter");
  piece.sort_notes();
  return normalize_timing(piece);
}

}  // namespace fretting
