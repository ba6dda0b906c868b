#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fretting/core.hpp"
#include "fretting/encodings.hpp"
#include "fretting/io.hpp"
#include "fretting/parallel.hpp"
#include "fretting/vocabulary.hpp"

namespace fretting {

struct SplitSpec {
  double train_fraction = 0.8;
  double valid_fraction = 0.1;
  double test_fraction = 0.1;
  std::uint64_t seed = 0;

  void validate() const {
    if (train_fraction < 0 || valid_fraction < 0 || test_fraction < 0 ||
        std::abs(train_fraction + valid_fraction + test_fraction - 1.0) > 1e-9) {
      throw DomainError("split fractions must be non-negative and sum to 1");
    }
  }
};

struct AugmentationSpec {
  int min_capo = 0;
  int max_capo = kMaxCapo;
  std::vector<Tuning> tunings = {Tuning::standard(), Tuning::half_step_down(), Tuning::full_step_down(),
                                 Tuning::drop_d()};
  std::uint64_t seed = 0;

  void validate() const {
    if (min_capo < 0 || max_capo > kMaxCapo || min_capo > max_capo) throw DomainError("capo range must lie within 0..7");
    if (tunings.empty()) throw DomainError("at least one tuning is required");
  }
};

/// Piece rejected by an augmentation because a position leaves the fretboard.
class AugmentationRejected : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Uniform integer in [0, bound) from a 64-bit engine, by rejection.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % bound;
}

template <typename T>
void deterministic_shuffle(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[uniform_below(rng, i)]);
  }
}

/// Lowercased, extension-stripped, whitespace-collapsed source id.
inline std::string normalized_source_id(const std::string& id) {
  std::string s = id;
  const auto dot = s.find_last_of('.');
  const auto slash = s.find_last_of("/\\");
  if (dot != std::string::npos && dot > 0 && (slash == std::string::npos || dot > slash)) s.erase(dot);
  std::string out;
  bool space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = true;
      continue;
    }
    if (space && !out.empty()) out += ' ';
    space = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

/// Keeps the first piece for every normalized source id.
inline std::vector<Piece> dedup(const std::vector<Piece>& pieces) {
  std::vector<Piece> out;
  std::set<std::string> seen;
  for (const auto& p : pieces) {
    if (seen.insert(normalized_source_id(p.source_id)).second) out.push_back(p);
  }
  return out;
}

struct SplitResult {
  std::vector<Piece> train;
  std::vector<Piece> valid;
  std::vector<Piece> test;
  std::vector<std::string> warnings;
};

/// Stratified split by (tuning, capo). Each stratum is shuffled with the seed
/// and cut by rounded fractions; a stratum too small to give every non-empty
/// split at least one piece goes wholly to train. Within a split pieces keep
/// their input order.
inline SplitResult split(const std::vector<Piece>& pieces, const SplitSpec& spec) {
  spec.validate();
  std::map<std::pair<std::string, int>, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    strata[{std::string(to_string(pieces[i].config.tuning.name)), pieces[i].config.capo}].push_back(i);
  }
  std::mt19937_64 rng(spec.seed);
  std::vector<int> assignment(pieces.size(), 0);  // 0 train, 1 valid, 2 test
  SplitResult result;
  for (auto& [key, members] : strata) {
    const double n = static_cast<double>(members.size());
    const bool too_small = (spec.valid_fraction > 0 && n * spec.valid_fraction < 1.0) ||
                           (spec.test_fraction > 0 && n * spec.test_fraction < 1.0);
    if (too_small) {
      result.warnings.push_back("stratum (" + key.first + ", capo " + std::to_string(key.second) + ") has " +
                                std::to_string(members.size()) + " piece(s); assigned to train");
      continue;
    }
    deterministic_shuffle(members, rng);
    const auto n_valid = static_cast<std::size_t>(std::floor(n * spec.valid_fraction + 0.5));
    const auto n_test = std::min(members.size() - n_valid, static_cast<std::size_t>(std::floor(n * spec.test_fraction + 0.5)));
    const std::size_t n_train = members.size() - n_valid - n_test;
    for (std::size_t k = 0; k < members.size(); ++k) {
      assignment[members[k]] = k < n_train ? 0 : (k < n_train + n_valid ? 1 : 2);
    }
  }
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    (assignment[i] == 0 ? result.train : assignment[i] == 1 ? result.valid : result.test).push_back(pieces[i]);
  }
  return result;
}

/// Re-expresses a standard-tuning, capo-0 piece with a capo: positions stay,
/// every pitch rises by `capo` semitones.
inline Piece augment_capo(const Piece& piece, int capo) {
  if (piece.config.tuning.name != TuningName::standard || piece.config.capo != 0) {
    throw DomainError("capo augmentation expects a standard-tuning piece without capo");
  }
  if (capo < 0 || capo > kMaxCapo) throw DomainError("capo must lie within 0..7");
  Piece out = piece;
  out.config.capo = capo;
  for (std::size_t i = 0; i < out.notes.size(); ++i) {
    auto& n = out.notes[i];
    if (n.position && n.position->fret > out.config.max_fret()) {
      throw AugmentationRejected("note " + std::to_string(i) + " at fret " + std::to_string(n.position->fret) +
                                 " does not fit below capo " + std::to_string(capo));
    }
    n.pitch = n.pitch + capo;
  }
  return out;
}

/// Moves an annotated piece to another tuning, keeping positions: each pitch
/// changes by its string's open-pitch difference.
inline Piece retune_piece(const Piece& piece, const Tuning& to) {
  Piece out = piece;
  for (std::size_t i = 0; i < out.notes.size(); ++i) {
    auto& n = out.notes[i];
    if (!n.position) throw DomainError("note " + std::to_string(i) + " has no position to retune");
    n.pitch = n.pitch + (to.open_pitch(n.position->string) - piece.config.tuning.open_pitch(n.position->string));
  }
  out.config.tuning = to;
  return out;
}

/// Retunes to a tuning drawn uniformly from `spec.tunings`.
inline Piece augment_tuning(const Piece& piece, std::mt19937_64& rng, const AugmentationSpec& spec = {}) {
  spec.validate();
  return retune_piece(piece, spec.tunings[uniform_below(rng, spec.tunings.size())]);
}

/// All capo variants of a piece in `spec`'s range that fit on the fretboard.
inline std::vector<Piece> capo_variants(const Piece& piece, const AugmentationSpec& spec = {}) {
  std::vector<Piece> out;
  for (int c = spec.min_capo; c <= spec.max_capo; ++c) {
    try {
      out.push_back(augment_capo(piece, c));
    } catch (const AugmentationRejected&) {
    }
  }
  return out;
}

/// Test-set capo rotation: pieces sorted by source id get capo index mod 8,
/// advancing to the next capo that fits when one does not.
inline std::vector<Piece> rotate_test_capos(std::vector<Piece> pieces) {
  std::stable_sort(pieces.begin(), pieces.end(),
                   [](const Piece& a, const Piece& b) { return a.source_id < b.source_id; });
  std::vector<Piece> out;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const int first = static_cast<int>(i % (kMaxCapo + 1));
    for (int k = 0; k <= kMaxCapo; ++k) {
      try {
        out.push_back(augment_capo(pieces[i], (first + k) % (kMaxCapo + 1)));
        break;
      } catch (const AugmentationRejected&) {
      }
    }
  }
  return out;
}

struct DatasetOptions {
  SplitSpec split;
  AugmentationSpec augmentation;
  EncodingId encoding = EncodingId::v3;
  bool conditioned = false;
  bool augment_capo = false;
  bool augment_tuning = false;
  std::size_t max_len = 512;
  std::size_t max_test_files = 0;  // 0 = no limit
  unsigned jobs = 1;
};

struct SkippedPiece {
  std::string source_id;
  std::string reason;
};

struct Manifest {
  EncodingId encoding = EncodingId::v3;
  bool conditioned = false;
  std::size_t max_len = 512;
  std::map<std::string, std::size_t> sequences;
  std::map<std::string, std::size_t> pieces;
  std::size_t vocab_size = 0;
  std::vector<SkippedPiece> skipped;
  std::vector<std::string> warnings;
  nlohmann::ordered_json settings = nlohmann::ordered_json::object();

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["encoding"] = std::string(to_string(encoding));
    j["conditioned"] = conditioned;
    j["max_len"] = max_len;
    j["vocab_size"] = vocab_size;
    j["sequences"] = sequences;
    j["pieces"] = pieces;
    j["settings"] = settings;
    auto skipped_json = nlohmann::ordered_json::array();
    for (const auto& s : skipped) skipped_json.push_back({{"source_id", s.source_id}, {"reason", s.reason}});
    j["skipped"] = skipped_json;
    j["warnings"] = warnings;
    return j;
  }
};

inline const std::vector<std::string>& split_names() {
  static const std::vector<std::string> names = {"train", "valid", "test"};
  return names;
}

/// Encodes pieces split by split name and writes `<split>.src`/`<split>.tgt`
/// (one sequence per line), `vocab.txt` and, last, `manifest.json`. Pieces
/// that cannot be cut into `max_len` sequences are skipped and reported. With
/// `retune_train`, every training sequence is moved to a tuning drawn from
/// the augmentation spec.
inline Manifest emit_token_dataset(const std::map<std::string, std::vector<Piece>>& splits, const fs::path& out_dir,
                                   const DatasetOptions& options, bool retune_train = false) {
  Manifest manifest;
  manifest.encoding = options.encoding;
  manifest.conditioned = options.conditioned;
  manifest.max_len = options.max_len;

  std::map<std::string, std::vector<EncodedPair>> sequences;
  std::vector<TokenSequence> corpus;
  std::mt19937_64 rng(options.augmentation.seed);
  for (const auto& name : split_names()) {
    const auto it = splits.find(name);
    const std::vector<Piece> empty;
    const auto& pieces = it == splits.end() ? empty : it->second;

    std::vector<std::vector<EncodedPair>> per_piece(pieces.size());
    std::vector<std::string> failures(pieces.size());
    parallel_for(pieces.size(), options.jobs, [&](std::size_t i) {
      if (!pieces[i].annotated()) throw DomainError("piece '" + pieces[i].source_id + "' is not annotated");
      try {
        per_piece[i] = split_sequences(encode(pieces[i], options.encoding, options.conditioned), options.max_len);
      } catch (const DomainError& e) {
        failures[i] = e.what();
      }
    });

    auto& out = sequences[name];
    std::size_t kept = 0;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      if (!failures[i].empty()) {
        manifest.skipped.push_back({pieces[i].source_id, failures[i]});
        continue;
      }
      ++kept;
      for (auto& chunk : per_piece[i]) {
        if (retune_train && name == "train") {
          const Tuning& to = options.augmentation.tunings[uniform_below(rng, options.augmentation.tunings.size())];
          chunk = retune(chunk, pieces[i].config.tuning, to);
        }
        out.push_back(std::move(chunk));
      }
    }
    manifest.pieces[name] = kept;
    manifest.sequences[name] = out.size();
    for (const auto& pair : out) {
      corpus.push_back(pair.input);
      corpus.push_back(pair.target);
    }
  }

  const Vocabulary vocab = Vocabulary::build(corpus);
  manifest.vocab_size = vocab.size();
  for (const auto& [name, pairs] : sequences) {
    std::string src;
    std::string tgt;
    for (const auto& pair : pairs) {
      src += to_string(pair.input) + "\n";
      tgt += to_string(pair.target) + "\n";
    }
    write_file_atomic(out_dir / (name + ".src"), src);
    write_file_atomic(out_dir / (name + ".tgt"), tgt);
  }
  std::ostringstream vocab_text;
  vocab.write(vocab_text);
  write_file_atomic(out_dir / "vocab.txt", vocab_text.str());
  return manifest;
}

inline void write_manifest(const fs::path& out_dir, const Manifest& manifest) {
  write_file_atomic(out_dir / "manifest.json", manifest.to_json().dump(2) + "\n");
}

/// Full corpus pipeline: dedup, stratified split, optional capo augmentation
/// (all fitting capos for train/valid, rotation for test), encoding, sequence
/// splitting, optional per-sequence tuning augmentation of the training split,
/// and emission of token files with a manifest.
inline Manifest build_dataset(const std::vector<Piece>& corpus, const fs::path& out_dir, const DatasetOptions& options) {
  options.split.validate();
  options.augmentation.validate();
  const auto unique = dedup(corpus);
  std::vector<SkippedPiece> skipped;
  std::vector<Piece> usable;
  for (const auto& p : unique) {
    if (!p.annotated()) {
      skipped.push_back({p.source_id, "piece is not annotated"});
    } else if (options.augment_capo && (p.config.tuning.name != TuningName::standard || p.config.capo != 0)) {
      skipped.push_back({p.source_id, "capo augmentation requires standard tuning without capo"});
    } else {
      usable.push_back(p);
    }
  }

  SplitResult parts = split(usable, options.split);
  if (options.max_test_files > 0 && parts.test.size() > options.max_test_files) {
    std::stable_sort(parts.test.begin(), parts.test.end(),
                     [](const Piece& a, const Piece& b) { return a.source_id < b.source_id; });
    parts.test.resize(options.max_test_files);
  }

  std::map<std::string, std::vector<Piece>> splits;
  if (options.augment_capo) {
    for (const auto* part : {&parts.train, &parts.valid}) {
      auto& dest = splits[part == &parts.train ? "train" : "valid"];
      for (const auto& p : *part) {
        for (auto& v : capo_variants(p, options.augmentation)) dest.push_back(std::move(v));
      }
    }
    splits["test"] = rotate_test_capos(parts.test);
  } else {
    splits["train"] = parts.train;
    splits["valid"] = parts.valid;
    splits["test"] = parts.test;
  }

  Manifest manifest = emit_token_dataset(splits, out_dir, options, options.augment_tuning);
  manifest.skipped.insert(manifest.skipped.begin(), skipped.begin(), skipped.end());
  manifest.warnings = parts.warnings;
  auto& s = manifest.settings;
  s["split"] = {options.split.train_fraction, options.split.valid_fraction, options.split.test_fraction};
  s["split_seed"] = options.split.seed;
  s["augmentation_seed"] = options.augmentation.seed;
  s["augment_capo"] = options.augment_capo;
  s["augment_tuning"] = options.augment_tuning;
  s["max_test_files"] = options.max_test_files;
  write_manifest(out_dir, manifest);
  return manifest;
}

}  // namespace fretting
