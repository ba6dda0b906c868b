#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fretting/core.hpp"
#include "fretting/timing.hpp"
#include "fretting/tokens.hpp"

namespace fretting {

/// Untimed encodings (v1, v2) decode to back-to-back notes of this length.
inline constexpr Tick kUntimedNoteLength = 120;

struct EncodedPair {
  TokenSequence input;
  TokenSequence target;

  bool operator==(const EncodedPair&) const = default;
};

namespace detail {

inline void push_time_shift(std::vector<Token>& out, Tick delta) {
  while (delta > kMaxTimeShift) {
    out.push_back(Token::time_shift(kMaxTimeShift));
    delta -= kMaxTimeShift;
  }
  if (delta > 0) out.push_back(Token::time_shift(delta));
}

inline void push_position(std::vector<Token>& out, EncodingId enc, Position pos) {
  if (split_tab(enc)) {
    out.push_back(Token::string(pos.string));
    out.push_back(Token::fret(pos.fret));
  } else {
    out.push_back(Token::tab(pos));
  }
}

inline Piece prepare_for_encoding(const Piece& piece) {
  for (std::size_t i = 0; i < piece.notes.size(); ++i) {
    if (piece.notes[i].end <= piece.notes[i].start) {
      throw DomainError("note " + std::to_string(i) + " has zero or negative length");
    }
  }
  Piece p = on_canonical_grid(piece) ? piece : normalize_timing(piece);
  if (!p.is_sorted()) p.sort_notes();
  return p;
}

inline std::size_t conditioning_length(const std::vector<Token>& tokens) {
  std::size_t n = 0;
  while (n < tokens.size() && tokens[n].is_conditioning()) ++n;
  return n;
}

/// Note slots of a target sequence: the position each TAB or STRING/FRET pair
/// names, and the token index where the slot starts.
struct TargetSlot {
  std::size_t token_index = 0;
  std::optional<Position> position;
};

inline std::vector<TargetSlot> target_slots(const TokenSequence& target, bool lenient) {
  std::vector<TargetSlot> slots;
  const auto& t = target.tokens;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Token& tok = t[i];
    if (!lenient && !grammatical(target.encoding, Side::target, tok)) {
      throw FormatError("target token " + std::to_string(i) + " '" + to_string(tok) + "' is not valid for " +
                            std::string(to_string(target.encoding)), i);
    }
    switch (tok.kind) {
      case TokenKind::tab:
        if (split_tab(target.encoding)) break;
        slots.push_back({i, Position{tok.args[0], tok.args[1]}});
        break;
      case TokenKind::string:
        if (!split_tab(target.encoding)) break;
        if (i + 1 < t.size() && t[i + 1].kind == TokenKind::fret) {
          slots.push_back({i, Position{tok.args[0], t[i + 1].args[0]}});
          ++i;
        } else if (!lenient) {
          throw FormatError("target token " + std::to_string(i) + " STRING without FRET", i);
        }
        break;
      case TokenKind::fret:
        if (!lenient && split_tab(target.encoding)) {
          throw FormatError("target token " + std::to_string(i) + " FRET without STRING", i);
        }
        break;
      case TokenKind::unk:
        if (!lenient) throw FormatError("target token " + std::to_string(i) + " is UNK", i);
        break;
      default:
        break;
    }
  }
  return slots;
}

struct DecodedInput {
  std::vector<NoteEvent> notes;  // NOTE_ON order
  std::optional<int> capo;
  std::optional<Tuning> tuning;
  Tick duration = 0;
};

inline DecodedInput decode_input(const TokenSequence& input, bool lenient) {
  const EncodingId enc = input.encoding;
  DecodedInput out;
  Tick now = 0;
  Tick last_onset = -1;
  std::map<int, std::deque<std::size_t>> open;  // pitch -> note indices, first in first out
  std::vector<std::size_t> sounding;            // v5: notes waiting for the next onset
  bool body_started = false;

  auto close = [&](std::size_t idx, std::size_t at) {
    NoteEvent& n = out.notes[idx];
    n.end = now;
    if (n.end <= n.start) {
      if (!lenient) throw FormatError("token " + std::to_string(at) + " closes a zero-length note", at);
      n.end = n.start + kTickGrid;
    }
  };

  for (std::size_t i = 0; i < input.tokens.size(); ++i) {
    const Token& tok = input.tokens[i];
    if (!grammatical(enc, Side::input, tok) || (tok.kind == TokenKind::unk && !lenient)) {
      throw FormatError("input token " + std::to_string(i) + " '" + to_string(tok) + "' is not valid for " +
                            std::string(to_string(enc)) + " input", i);
    }
    switch (tok.kind) {
      case TokenKind::capo:
      case TokenKind::tuning:
        if (body_started) throw FormatError("conditioning token " + std::to_string(i) + " after note events", i);
        if (tok.kind == TokenKind::capo) {
          out.capo = tok.args[0];
        } else {
          out.tuning = Tuning::from_pitches(tok.args);
        }
        break;
      case TokenKind::note_on: {
        body_started = true;
        if (!is_timed(enc)) {
          const Tick start = static_cast<Tick>(out.notes.size()) * kUntimedNoteLength;
          out.notes.push_back({start, start + kUntimedNoteLength, Pitch{tok.args[0]}, std::nullopt});
          out.duration = start + kUntimedNoteLength;
          break;
        }
        if (enc == EncodingId::v5 && now > last_onset) {
          for (auto idx : sounding) close(idx, i);
          sounding.clear();
        }
        last_onset = now;
        const std::size_t idx = out.notes.size();
        out.notes.push_back({now, now, Pitch{tok.args[0]}, std::nullopt});
        if (enc == EncodingId::v5) {
          sounding.push_back(idx);
        } else {
          open[tok.args[0]].push_back(idx);
        }
        break;
      }
      case TokenKind::note_off: {
        body_started = true;
        auto it = open.find(tok.args[0]);
        if (it == open.end() || it->second.empty()) {
          if (!lenient) throw FormatError("token " + std::to_string(i) + " NOTE_OFF without matching NOTE_ON", i);
          break;
        }
        const std::size_t idx = it->second.front();
        it->second.pop_front();
        close(idx, i);
        break;
      }
      case TokenKind::time_shift:
        body_started = true;
        now += tok.args[0];
        break;
      default:
        break;  // PAD/BOS/EOS/UNK
    }
  }
  if (is_timed(enc)) {
    // dangling notes end at the final timestamp
    for (auto& [pitch, idxs] : open) {
      for (auto idx : idxs) close(idx, input.tokens.size());
    }
    for (auto idx : sounding) close(idx, input.tokens.size());
    out.duration = now;
  }
  return out;
}

inline Piece assemble(const DecodedInput& decoded, GuitarConfig config) {
  if (decoded.tuning) config.tuning = *decoded.tuning;
  if (decoded.capo) config.capo = *decoded.capo;
  config.validate();
  Piece piece;
  piece.config = config;
  piece.ppq = kCanonicalPpq;
  return piece;
}

}  // namespace detail

/// Encodes only the input side; positions are not required.
inline TokenSequence encode_input(const Piece& piece, EncodingId enc, bool conditioned) {
  const Piece p = detail::prepare_for_encoding(piece);
  TokenSequence input{enc, Side::input, {}};
  if (conditioned) {
    input.tokens.push_back(Token::capo(p.config.capo));
    input.tokens.push_back(Token::tuning(p.config.tuning));
  }
  if (!is_timed(enc)) {
    for (const auto& n : p.notes) input.tokens.push_back(Token::note_on(n.pitch));
    return input;
  }

  struct Event {
    Tick time;
    int kind;  // 0 = off, 1 = on
    std::size_t index;
  };
  std::vector<Event> events;
  Tick final_time = p.end_time();
  for (std::size_t i = 0; i < p.notes.size(); ++i) {
    events.push_back({p.notes[i].start, 1, i});
    if (has_note_off(enc)) events.push_back({p.notes[i].end, 0, i});
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    return std::tie(a.time, a.kind, a.index) < std::tie(b.time, b.kind, b.index);
  });
  Tick now = 0;
  for (const auto& e : events) {
    detail::push_time_shift(input.tokens, e.time - now);
    now = e.time;
    input.tokens.push_back(e.kind == 1 ? Token::note_on(p.notes[e.index].pitch) : Token::note_off(p.notes[e.index].pitch));
  }
  detail::push_time_shift(input.tokens, final_time - now);
  return input;
}

/// Encodes a fully annotated piece into an (input, target) pair. Within a
/// tick NOTE_OFFs precede NOTE_ONs, each in canonical note order; the target
/// replaces every NOTE_ON by its position, drops NOTE_OFFs and keeps the
/// TIME_SHIFTs. Conditioning tokens go on the input side only.
inline EncodedPair encode(const Piece& piece, EncodingId enc, bool conditioned = false) {
  for (std::size_t i = 0; i < piece.notes.size(); ++i) {
    if (!piece.notes[i].position) throw DomainError("note " + std::to_string(i) + " has no position to encode");
  }
  const Piece p = detail::prepare_for_encoding(piece);
  EncodedPair pair{encode_input(p, enc, conditioned), {enc, Side::target, {}}};

  std::size_t next_note = 0;
  for (const Token& tok : pair.input.tokens) {
    if (tok.kind == TokenKind::note_on) {
      detail::push_position(pair.target.tokens, enc, *p.notes[next_note++].position);
    } else if (tok.kind == TokenKind::time_shift) {
      pair.target.tokens.push_back(tok);
    }
  }
  return pair;
}

/// Inverse of `encode`. Timing and pitch come from the input, positions from
/// the target, matched to NOTE_ONs in order. Conditioning tokens, when
/// present, override the capo and tuning of `config`.
inline Piece decode(const TokenSequence& input, const TokenSequence& target, EncodingId enc,
                    const GuitarConfig& config = {}) {
  if (input.encoding != enc || target.encoding != enc) throw DomainError("sequence encoding mismatch");
  const auto decoded = detail::decode_input(input, false);
  const auto slots = detail::target_slots(target, false);
  if (slots.size() != decoded.notes.size()) {
    throw AlignmentError(decoded.notes.size(), slots.size(), "target position count does not match input notes");
  }
  Piece piece = detail::assemble(decoded, config);
  piece.notes = decoded.notes;
  for (std::size_t i = 0; i < slots.size(); ++i) piece.notes[i].position = slots[i].position;
  piece.sort_notes();
  return piece;
}

inline Piece decode(const EncodedPair& pair, const GuitarConfig& config = {}) {
  return decode(pair.input, pair.target, pair.input.encoding, config);
}

/// Decodes untrusted model output into an estimated tablature. One note per
/// target position: timing from the input note at the same index (the last
/// input note when the model produced extra positions), pitch as sounded by
/// the position. Positions outside the fretboard are dropped, leaving the
/// note unannotated with the input pitch.
inline Piece decode_estimated(const TokenSequence& input, const TokenSequence& target, EncodingId enc,
                              const GuitarConfig& config = {}) {
  if (input.encoding != enc || target.encoding != enc) throw DomainError("sequence encoding mismatch");
  const auto decoded = detail::decode_input(input, true);
  const auto slots = detail::target_slots(target, true);
  Piece piece = detail::assemble(decoded, config);
  if (decoded.notes.empty()) return piece;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    NoteEvent n = decoded.notes[std::min(i, decoded.notes.size() - 1)];
    if (slots[i].position && is_valid(piece.config, *slots[i].position)) {
      n.position = slots[i].position;
      n.pitch = sounding_pitch(piece.config, *n.position);
    }
    piece.notes.push_back(n);
  }
  piece.sort_notes();
  return piece;
}

/// Time covered by an input sequence: the sum of its TIME_SHIFTs, or the
/// synthetic note spacing for untimed encodings.
inline Tick sequence_duration(const TokenSequence& input) {
  Tick total = 0;
  for (const Token& t : input.tokens) {
    if (is_timed(input.encoding) && t.kind == TokenKind::time_shift) total += t.args[0];
    if (!is_timed(input.encoding) && t.kind == TokenKind::note_on) total += kUntimedNoteLength;
  }
  return total;
}

namespace detail {

/// Token ranges [begin, end) of the input body (after conditioning tokens)
/// for each chunk.
inline std::vector<std::pair<std::size_t, std::size_t>> split_ranges(const std::vector<Token>& body, EncodingId enc,
                                                                     std::size_t budget, std::size_t max_len) {
  std::vector<bool> allowed(body.size() + 1, false);
  allowed[body.size()] = true;
  int sounding = 0;
  for (std::size_t i = 0; i < body.size(); ++i) {
    const Token& t = body[i];
    if (t.kind == TokenKind::note_on && i > 0) {
      if (has_note_off(enc)) {
        allowed[i] = sounding == 0;
      } else if (enc == EncodingId::v5) {
        allowed[i] = body[i - 1].kind == TokenKind::time_shift;
      } else {
        allowed[i] = true;
      }
    }
    if (t.kind == TokenKind::note_on) ++sounding;
    if (t.kind == TokenKind::note_off && sounding > 0) --sounding;
  }

  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  std::size_t begin = 0;
  while (begin < body.size()) {
    std::size_t cut = 0;
    for (std::size_t b = std::min(body.size(), begin + budget); b > begin; --b) {
      if (allowed[b]) {
        cut = b;
        break;
      }
    }
    if (cut == 0) {
      std::size_t next = begin + 1;
      while (!allowed[next]) ++next;
      throw DomainError("note group of " + std::to_string(next - begin) + " tokens exceeds max_len " +
                        std::to_string(max_len));
    }
    ranges.emplace_back(begin, cut);
    begin = cut;
  }
  if (ranges.empty()) ranges.emplace_back(0, 0);
  return ranges;
}

}  // namespace detail

/// Splits an input sequence into chunks of at most `max_len` tokens. Chunks
/// break only before a NOTE_ON that starts a new note group: for v3/v4 no note
/// may be sounding across the split, for v5 the break must follow a
/// TIME_SHIFT. Conditioning tokens are repeated at the start of every chunk
/// and count against `max_len`.
inline std::vector<TokenSequence> split_input(const TokenSequence& input, std::size_t max_len = 512) {
  const std::size_t cond = detail::conditioning_length(input.tokens);
  if (cond >= max_len) throw DomainError("max_len leaves no room after conditioning tokens");
  const auto split_at = input.tokens.begin() + static_cast<std::ptrdiff_t>(cond);
  const std::vector<Token> prefix(input.tokens.begin(), split_at);
  const std::vector<Token> body(split_at, input.tokens.end());
  std::vector<TokenSequence> chunks;
  for (const auto& [b, e] : detail::split_ranges(body, input.encoding, max_len - cond, max_len)) {
    TokenSequence chunk{input.encoding, Side::input, prefix};
    chunk.tokens.insert(chunk.tokens.end(), body.begin() + static_cast<std::ptrdiff_t>(b),
                        body.begin() + static_cast<std::ptrdiff_t>(e));
    chunks.push_back(std::move(chunk));
  }
  return chunks;
}

/// Splits an encoded pair as `split_input` does; the target is cut
/// note-for-note alongside, TIME_SHIFTs staying with the preceding note.
inline std::vector<EncodedPair> split_sequences(const TokenSequence& input, const TokenSequence& target,
                                                std::size_t max_len = 512) {
  const auto inputs = split_input(input, max_len);
  const auto slots = detail::target_slots(target, false);
  std::size_t total_on = 0;
  for (const Token& t : input.tokens) total_on += t.kind == TokenKind::note_on;
  if (slots.size() != total_on) {
    throw AlignmentError(total_on, slots.size(), "target position count does not match input notes");
  }

  std::vector<EncodedPair> chunks;
  std::size_t notes_before = 0;
  std::size_t target_begin = 0;
  for (std::size_t c = 0; c < inputs.size(); ++c) {
    for (const Token& t : inputs[c].tokens) notes_before += t.kind == TokenKind::note_on;
    const std::size_t target_end = c + 1 == inputs.size() ? target.tokens.size() : slots[notes_before].token_index;
    TokenSequence part{target.encoding, Side::target,
                       {target.tokens.begin() + static_cast<std::ptrdiff_t>(target_begin),
                        target.tokens.begin() + static_cast<std::ptrdiff_t>(target_end)}};
    target_begin = target_end;
    chunks.push_back({inputs[c], std::move(part)});
  }
  return chunks;
}

inline std::vector<EncodedPair> split_sequences(const EncodedPair& pair, std::size_t max_len = 512) {
  return split_sequences(pair.input, pair.target, max_len);
}

/// Decodes consecutive chunks and joins them on one timeline.
inline Piece decode_chunks(const std::vector<EncodedPair>& chunks, const GuitarConfig& config = {}) {
  Piece out;
  out.config = config;
  out.ppq = kCanonicalPpq;
  Tick offset = 0;
  for (std::size_t c = 0; c < chunks.size(); ++c) {
    Piece part = decode(chunks[c], config);
    if (c == 0) out.config = part.config;
    for (auto n : part.notes) {
      n.start += offset;
      n.end += offset;
      out.notes.push_back(n);
    }
    offset += sequence_duration(chunks[c].input);
  }
  out.sort_notes();
  return out;
}

/// Rewrites an encoded pair as if the piece were played in `to` instead of
/// `from`: every pitch moves by its string's open-pitch difference and the
/// TUNING token, if any, is replaced. Positions are untouched.
inline EncodedPair retune(const EncodedPair& pair, const Tuning& from, const Tuning& to) {
  EncodedPair out = pair;
  const auto slots = detail::target_slots(pair.target, false);
  std::map<int, std::deque<int>> open;  // original pitch -> strings
  std::size_t next_note = 0;
  for (Token& tok : out.input.tokens) {
    switch (tok.kind) {
      case TokenKind::tuning:
        tok = Token::tuning(to);
        break;
      case TokenKind::note_on: {
        if (next_note >= slots.size()) {
          throw AlignmentError(next_note + 1, slots.size(), "target position count does not match input notes");
        }
        const int string = slots[next_note++].position->string;
        if (has_note_off(pair.input.encoding)) open[tok.args[0]].push_back(string);
        tok = Token::note_on(Pitch{tok.args[0]} + (to.open_pitch(string) - from.open_pitch(string)));
        break;
      }
      case TokenKind::note_off: {
        auto& q = open[tok.args[0]];
        if (q.empty()) throw FormatError("NOTE_OFF without matching NOTE_ON", 0);
        const int string = q.front();
        q.pop_front();
        tok = Token::note_off(Pitch{tok.args[0]} + (to.open_pitch(string) - from.open_pitch(string)));
        break;
      }
      default:
        break;
    }
  }
  if (next_note != slots.size()) {
    throw AlignmentError(next_note, slots.size(), "target position count does not match input notes");
  }
  return out;
}

}  // namespace fretting
