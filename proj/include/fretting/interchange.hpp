#pragma once

#include <istream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "fretting/core.hpp"

namespace fretting {

/// `.tabnotes.jsonl`: a header object followed by one object per note,
/// in canonical note order.
///
///   {"ppq":480,"tuning":[64,59,55,50,45,40],"capo":0,"source_id":"song"}
///   {"start":0,"end":480,"pitch":55,"string":3,"fret":0}
inline constexpr const char* kInterchangeExtension = ".tabnotes.jsonl";

inline std::string write_interchange(const Piece& piece) {
  using nlohmann::ordered_json;
  std::string out;
  ordered_json header;
  header["ppq"] = piece.ppq;
  ordered_json tuning = ordered_json::array();
  for (const Pitch p : piece.config.tuning.open) tuning.push_back(p.midi());
  header["tuning"] = tuning;
  header["capo"] = piece.config.capo;
  header["source_id"] = piece.source_id;
  out += header.dump() + "\n";
  for (const auto& n : piece.notes) {
    ordered_json rec;
    rec["start"] = n.start;
    rec["end"] = n.end;
    rec["pitch"] = n.pitch.midi();
    if (n.position) {
      rec["string"] = n.position->string;
      rec["fret"] = n.position->fret;
    }
    out += rec.dump() + "\n";
  }
  return out;
}

namespace detail {

template <typename T>
T field(const nlohmann::json& obj, const char* key, std::size_t line) {
  if (!obj.contains(key)) throw FormatError("line " + std::to_string(line) + ": missing field '" + key + "'", line);
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw FormatError("line " + std::to_string(line) + ": field '" + key + "' has the wrong type", line);
  }
}

}  // namespace detail

/// Parses interchange text. Positions are range-checked against the header's
/// configuration but not against the note pitch, so estimated (possibly wrong)
/// tablatures can be carried too.
inline Piece read_interchange(std::istream& in) {
  Piece piece;
  bool have_header = false;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError("line " + std::to_string(line) + ": " + e.what(), line);
    }
    if (!obj.is_object()) throw FormatError("line " + std::to_string(line) + ": expected a JSON object", line);

    if (!have_header) {
      if (!obj.contains("ppq")) throw FormatError("line " + std::to_string(line) + ": missing header", line);
      piece.ppq = detail::field<int>(obj, "ppq", line);
      const auto tuning = detail::field<std::vector<int>>(obj, "tuning", line);
      if (tuning.size() != kNumStrings) {
        throw FormatError("line " + std::to_string(line) + ": tuning must have 6 pitches", line);
      }
      try {
        piece.config.tuning = Tuning::from_pitches({tuning[0], tuning[1], tuning[2], tuning[3], tuning[4], tuning[5]});
        piece.config.capo = detail::field<int>(obj, "capo", line);
        piece.config.validate();
      } catch (const DomainError& e) {
        throw FormatError("line " + std::to_string(line) + ": " + e.what(), line);
      }
      if (piece.ppq <= 0) throw FormatError("line " + std::to_string(line) + ": ppq must be positive", line);
      piece.source_id = obj.contains("source_id") ? detail::field<std::string>(obj, "source_id", line) : "";
      have_header = true;
      continue;
    }

    NoteEvent note;
    note.start = detail::field<Tick>(obj, "start", line);
    note.end = detail::field<Tick>(obj, "end", line);
    const int pitch = detail::field<int>(obj, "pitch", line);
    if (!Pitch::valid(pitch)) throw FormatError("line " + std::to_string(line) + ": pitch out of range", line);
    note.pitch = Pitch{pitch};
    if (note.start < 0 || note.end <= note.start) {
      throw FormatError("line " + std::to_string(line) + ": note must have end > start >= 0", line);
    }
    const bool has_string = obj.contains("string");
    const bool has_fret = obj.contains("fret");
    if (has_string != has_fret) {
      throw FormatError("line " + std::to_string(line) + ": string and fret must both be present or both absent", line);
    }
    if (has_string) {
      const Position pos{detail::field<int>(obj, "string", line), detail::field<int>(obj, "fret", line)};
      if (!is_valid(piece.config, pos)) {
        throw FormatError("line " + std::to_string(line) + ": position out of range", line);
      }
      note.position = pos;
    }
    if (!piece.notes.empty() && canonical_less(note, piece.notes.back())) {
      throw FormatError("line " + std::to_string(line) + ": records are not sorted", line);
    }
    piece.notes.push_back(note);
  }
  if (!have_header) throw FormatError("missing header", line);
  return piece;
}

inline Piece read_interchange(const std::string& text) {
  std::istringstream in(text);
  return read_interchange(in);
}

}  // namespace fretting
