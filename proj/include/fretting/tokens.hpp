#pragma once

#include <array>
#include <charconv>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fretting/core.hpp"

namespace fretting {

enum class TokenKind { pad, bos, eos, unk, note_on, note_off, time_shift, string, fret, tab, capo, tuning };

/// One word of the closed token grammar. Unused argument slots are zero.
struct Token {
  TokenKind kind = TokenKind::unk;
  std::array<int, kNumStrings> args{};

  bool operator==(const Token&) const = default;

  static Token pad() { return {TokenKind::pad, {}}; }
  static Token bos() { return {TokenKind::bos, {}}; }
  static Token eos() { return {TokenKind::eos, {}}; }
  static Token unk() { return {TokenKind::unk, {}}; }
  static Token note_on(Pitch p) { return {TokenKind::note_on, {p.midi()}}; }
  static Token note_off(Pitch p) { return {TokenKind::note_off, {p.midi()}}; }
  static Token time_shift(Tick t) { return {TokenKind::time_shift, {static_cast<int>(t)}}; }
  static Token string(int s) { return {TokenKind::string, {s}}; }
  static Token fret(int f) { return {TokenKind::fret, {f}}; }
  static Token tab(Position p) { return {TokenKind::tab, {p.string, p.fret}}; }
  static Token capo(int c) { return {TokenKind::capo, {c}}; }
  static Token tuning(const Tuning& t) {
    Token tok{TokenKind::tuning, {}};
    for (std::size_t i = 0; i < tok.args.size(); ++i) tok.args[i] = t.open[i].midi();
    return tok;
  }

  bool is_special() const noexcept { return kind <= TokenKind::unk; }
  bool is_conditioning() const noexcept { return kind == TokenKind::capo || kind == TokenKind::tuning; }
};

inline std::string to_string(const Token& t) {
  auto one = [&](const char* name) { return std::string(name) + "<" + std::to_string(t.args[0]) + ">"; };
  switch (t.kind) {
    case TokenKind::pad: return "PAD";
    case TokenKind::bos: return "BOS";
    case TokenKind::eos: return "EOS";
    case TokenKind::unk: return "UNK";
    case TokenKind::note_on: return one("NOTE_ON");
    case TokenKind::note_off: return one("NOTE_OFF");
    case TokenKind::time_shift: return one("TIME_SHIFT");
    case TokenKind::string: return one("STRING");
    case TokenKind::fret: return one("FRET");
    case TokenKind::capo: return one("CAPO");
    case TokenKind::tab: return "TAB<" + std::to_string(t.args[0]) + "," + std::to_string(t.args[1]) + ">";
    case TokenKind::tuning: {
      std::string s = "TUNING<";
      for (std::size_t i = 0; i < t.args.size(); ++i) s += (i ? "," : "") + std::to_string(t.args[i]);
      return s + ">";
    }
  }
  return "UNK";
}

/// Parses one token; std::nullopt when the text is not in the grammar.
inline std::optional<Token> parse_token(std::string_view text) {
  if (text == "PAD") return Token::pad();
  if (text == "BOS") return Token::bos();
  if (text == "EOS") return Token::eos();
  if (text == "UNK") return Token::unk();

  const auto open = text.find('<');
  if (open == std::string_view::npos || text.back() != '>') return std::nullopt;
  const std::string_view name = text.substr(0, open);
  std::string_view body = text.substr(open + 1, text.size() - open - 2);

  std::vector<int> args;
  while (true) {
    const auto comma = body.find(',');
    const std::string_view part = body.substr(0, comma);
    int value = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (ec != std::errc{} || ptr != part.data() + part.size() || part.empty()) return std::nullopt;
    args.push_back(value);
    if (comma == std::string_view::npos) break;
    body = body.substr(comma + 1);
  }

  struct Rule {
    std::string_view name;
    TokenKind kind;
    std::size_t arity;
  };
  static constexpr Rule rules[] = {
      {"NOTE_ON", TokenKind::note_on, 1}, {"NOTE_OFF", TokenKind::note_off, 1},
      {"TIME_SHIFT", TokenKind::time_shift, 1}, {"STRING", TokenKind::string, 1},
      {"FRET", TokenKind::fret, 1}, {"TAB", TokenKind::tab, 2},
      {"CAPO", TokenKind::capo, 1}, {"TUNING", TokenKind::tuning, kNumStrings},
  };
  for (const auto& rule : rules) {
    if (rule.name != name) continue;
    if (args.size() != rule.arity) return std::nullopt;
    Token t{rule.kind, {}};
    for (std::size_t i = 0; i < args.size(); ++i) t.args[i] = args[i];

    auto pitch_ok = [](int p) { return Pitch::valid(p); };
    auto string_ok = [](int s) { return s >= 1 && s <= kNumStrings; };
    switch (rule.kind) {
      case TokenKind::note_on:
      case TokenKind::note_off:
        if (!pitch_ok(args[0])) return std::nullopt;
        break;
      case TokenKind::time_shift:
        if (args[0] <= 0) return std::nullopt;
        break;
      case TokenKind::string:
        if (!string_ok(args[0])) return std::nullopt;
        break;
      case TokenKind::fret:
      case TokenKind::capo:
        if (args[0] < 0) return std::nullopt;
        break;
      case TokenKind::tab:
        if (!string_ok(args[0]) || args[1] < 0) return std::nullopt;
        break;
      case TokenKind::tuning:
        for (int p : args) {
          if (!pitch_ok(p)) return std::nullopt;
        }
        break;
      default:
        break;
    }
    return t;
  }
  return std::nullopt;
}

enum class EncodingId { v1, v2, v3, v4, v5 };
enum class Side { input, target };

inline std::string_view to_string(EncodingId e) {
  static constexpr std::string_view names[] = {"v1", "v2", "v3", "v4", "v5"};
  return names[static_cast<int>(e)];
}

inline std::optional<EncodingId> parse_encoding(std::string_view name) {
  for (EncodingId e : {EncodingId::v1, EncodingId::v2, EncodingId::v3, EncodingId::v4, EncodingId::v5}) {
    if (to_string(e) == name) return e;
  }
  return std::nullopt;
}

/// Encodings carrying timing on the input side.
inline bool is_timed(EncodingId e) { return e == EncodingId::v3 || e == EncodingId::v4 || e == EncodingId::v5; }
inline bool has_note_off(EncodingId e) { return e == EncodingId::v3 || e == EncodingId::v4; }
/// Encodings whose target splits a position into STRING and FRET tokens.
inline bool split_tab(EncodingId e) { return e == EncodingId::v1 || e == EncodingId::v4; }

/// Whether `t` may appear in a sequence of the given encoding and side.
inline bool grammatical(EncodingId enc, Side side, const Token& t) {
  if (t.is_special()) return true;
  if (side == Side::input) {
    switch (t.kind) {
      case TokenKind::capo:
      case TokenKind::tuning:
      case TokenKind::note_on: return true;
      case TokenKind::time_shift: return is_timed(enc);
      case TokenKind::note_off: return has_note_off(enc);
      default: return false;
    }
  }
  switch (t.kind) {
    case TokenKind::string:
    case TokenKind::fret: return split_tab(enc);
    case TokenKind::tab: return !split_tab(enc);
    case TokenKind::time_shift: return is_timed(enc);
    default: return false;
  }
}

struct TokenSequence {
  EncodingId encoding = EncodingId::v3;
  Side side = Side::input;
  std::vector<Token> tokens;

  bool operator==(const TokenSequence&) const = default;

  std::size_t size() const noexcept { return tokens.size(); }
};

/// Space-separated token text, the line format of `.src`/`.tgt` files.
inline std::string to_string(const TokenSequence& seq) {
  std::string out;
  for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
    if (i) out += ' ';
    out += to_string(seq.tokens[i]);
  }
  return out;
}

/// Parses a line of tokens. Unknown or ungrammatical tokens are an error
/// unless `unknown_as_unk` is set, in which case they become UNK.
inline TokenSequence parse_sequence(std::string_view line, EncodingId enc, Side side, bool unknown_as_unk = false) {
  TokenSequence seq{enc, side, {}};
  std::istringstream in{std::string(line)};
  std::string word;
  while (in >> word) {
    auto tok = parse_token(word);
    if (!tok || !grammatical(enc, side, *tok)) {
      if (!unknown_as_unk) {
        throw FormatError("token " + std::to_string(seq.tokens.size()) + " '" + word + "' is not valid for " +
                              std::string(to_string(enc)) + (side == Side::input ? " input" : " target"),
                          seq.tokens.size());
      }
      tok = Token::unk();
    }
    seq.tokens.push_back(*tok);
  }
  return seq;
}

}  // namespace fretting
