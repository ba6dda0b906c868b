#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "fretting/arranger.hpp"
#include "fretting/core.hpp"
#include "fretting/encodings.hpp"

namespace fretting {

inline constexpr std::size_t kInferenceChunkSize = 20;

/// A run of note groups processed together at inference time. Every chunk
/// after the first also carries the last group of its predecessor as context.
struct NoteChunk {
  std::size_t begin_group = 0;
  std::size_t end_group = 0;
  std::optional<std::size_t> context_group;

  std::size_t size() const noexcept { return end_group - begin_group; }
  bool operator==(const NoteChunk&) const = default;
};

/// Token fragments of the context group, placed ahead of a chunk on both the
/// encoder and the decoder side.
struct ChunkContext {
  TokenSequence last_note_input_tokens;
  TokenSequence last_note_target_tokens;
};

inline std::vector<NoteChunk> chunk_notes(const Piece& piece, std::size_t chunk_size = kInferenceChunkSize) {
  if (chunk_size < 2) throw DomainError("chunk size must be at least 2");
  const std::size_t n_groups = note_groups(piece.notes).size();
  std::vector<NoteChunk> chunks;
  for (std::size_t begin = 0; begin < n_groups; begin += chunk_size) {
    NoteChunk c{begin, std::min(n_groups, begin + chunk_size), std::nullopt};
    if (begin > 0) c.context_group = begin - 1;
    chunks.push_back(c);
  }
  return chunks;
}

/// Notes of a chunk, context group first, on their original timeline.
inline Piece chunk_piece(const Piece& piece, const NoteChunk& chunk) {
  const auto groups = note_groups(piece.notes);
  Piece out = piece;
  out.notes.clear();
  const std::size_t first = chunk.context_group.value_or(chunk.begin_group);
  for (std::size_t g = first; g < chunk.end_group; ++g) {
    for (std::size_t i = groups[g].begin; i < groups[g].end; ++i) out.notes.push_back(piece.notes[i]);
  }
  return out;
}

/// Encodes the context group of `chunk`, whose notes must already carry
/// positions (the previous chunk's output).
inline ChunkContext chunk_context(const Piece& piece, const NoteChunk& chunk, EncodingId enc) {
  if (!chunk.context_group) return {{enc, Side::input, {}}, {enc, Side::target, {}}};
  const auto groups = note_groups(piece.notes);
  const NoteGroup g = groups.at(*chunk.context_group);
  Piece context = piece;
  context.notes.assign(piece.notes.begin() + static_cast<std::ptrdiff_t>(g.begin),
                       piece.notes.begin() + static_cast<std::ptrdiff_t>(g.end));
  const Tick origin = context.notes.front().start;
  for (auto& n : context.notes) {
    n.start -= origin;
    n.end -= origin;
  }
  const auto pair = encode(context, enc, false);
  return {pair.input, pair.target};
}

/// Arranges one chunk. `context` holds the already decided positions of the
/// chunk's first note group, in (pitch, end) order, when the chunk has one.
using ChunkArranger = std::function<Piece(const Piece& chunk, const std::optional<Fingering>& context)>;

/// Runs `arranger` chunk by chunk, feeding each chunk the last decision of
/// the previous one, and joins the results dropping each context group once.
inline Piece arrange_chunked(const Piece& piece, const ChunkArranger& arranger,
                             std::size_t chunk_size = kInferenceChunkSize) {
  const Piece input = piece.without_positions();
  Piece out = input;
  out.notes.clear();
  std::optional<Fingering> carried;
  for (const NoteChunk& chunk : chunk_notes(input, chunk_size)) {
    const Piece part = chunk_piece(input, chunk);
    Piece arranged = arranger(part, chunk.context_group ? carried : std::nullopt);
    if (arranged.notes.size() != part.notes.size()) {
      throw AlignmentError(part.notes.size(), arranged.notes.size(), "chunk arranger changed the note count");
    }
    out.config = arranged.config;
    const Tick context_start = part.notes.front().start;
    const Tick last_start = part.notes.back().start;
    std::vector<NoteEvent> last_group;
    for (const auto& n : arranged.notes) {
      if (!(chunk.context_group && n.start == context_start)) out.notes.push_back(n);
      if (n.start == last_start) last_group.push_back(n);
    }
    std::stable_sort(last_group.begin(), last_group.end(), [](const NoteEvent& a, const NoteEvent& b) {
      return std::tie(a.pitch, a.end) < std::tie(b.pitch, b.end);
    });
    carried = Fingering{};
    for (const auto& n : last_group) {
      if (!n.position) throw DomainError("chunk arranger left a note without a position");
      carried->positions.push_back(*n.position);
    }
  }
  if (out.notes.size() != input.notes.size()) {
    throw AlignmentError(input.notes.size(), out.notes.size(), "chunk reassembly lost or duplicated notes");
  }
  out.sort_notes();
  return out;
}

/// Chunked optimal arrangement: each chunk's path starts from the previous
/// chunk's final fingering.
inline Piece arrange_optimal_chunked(const Piece& piece, const GuitarConfig& config, const DifficultyParams& params = {},
                                     std::size_t chunk_size = kInferenceChunkSize) {
  return arrange_chunked(
      piece,
      [&](const Piece& chunk, const std::optional<Fingering>& context) {
        return arrange_optimal(chunk, config, params, context);
      },
      chunk_size);
}

}  // namespace fretting
