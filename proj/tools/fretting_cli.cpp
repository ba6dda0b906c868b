// Command-line front end: one subcommand per pipeline stage.
//
// Exit codes: 0 success, 1 domain error (unplayable pitch, infeasible chord,
// misaligned notes), 2 I/O, format or usage error.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fretting/fretting.hpp"

namespace {

using namespace fretting;

std::vector<std::string> read_keywords(const fs::path& path) {
  std::vector<std::string> out;
  std::istringstream in(read_text_file(path));
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r");
    out.push_back(line.substr(b, e - b + 1));
  }
  return out;
}

GuitarConfig with_overrides(GuitarConfig config, const std::string& tuning, std::optional<int> capo) {
  if (!tuning.empty()) {
    const auto t = Tuning::by_name(tuning);
    if (!t) throw DomainError("unknown tuning '" + tuning + "'");
    config.tuning = *t;
  }
  if (capo) config.capo = *capo;
  config.validate();
  return config;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::vector<std::string> lines;
  std::istringstream in(read_text_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::string join_lines(const std::vector<TokenSequence>& seqs) {
  std::string out;
  for (const auto& s : seqs) out += to_string(s) + "\n";
  return out;
}

struct IngestArgs {
  std::vector<std::string> inputs;
  std::string out;
  std::vector<int> programs{25, 26};
  std::string keywords;
};

int run_ingest(const IngestArgs& a) {
  FilterSpec filter;
  filter.programs = {a.programs.begin(), a.programs.end()};
  if (!a.keywords.empty()) filter.keywords = read_keywords(a.keywords);
  for (const auto& input : a.inputs) {
    const fs::path path(input);
    const auto bytes = read_binary_file(path);
    Piece piece;
    try {
      piece = parse_midi(bytes, filter);
    } catch (const Error& e) {
      std::cerr << path.string() << ": ";
      throw;
    }
    piece.source_id = path.filename().string();
    const fs::path dest = fs::path(a.out) / (path.stem().string() + kInterchangeExtension);
    save_interchange(dest, piece);
    std::cout << dest.string() << "\t" << piece.notes.size() << " notes\n";
  }
  return 0;
}

struct ArrangeArgs {
  std::string input;
  std::string method = "astar";
  std::string tuning;
  std::optional<int> capo;
  double alpha = 0.25;
  std::size_t chunk_notes = 0;
  std::string out;
};

int run_arrange(const ArrangeArgs& a) {
  const Piece piece = load_interchange(a.input);
  const GuitarConfig config = with_overrides(piece.config, a.tuning, a.capo);
  DifficultyParams params;
  params.alpha = a.alpha;
  Piece result;
  if (a.method == "baseline") {
    result = arrange_baseline(piece, config);
  } else if (a.chunk_notes > 0) {
    result = arrange_optimal_chunked(piece, config, params, a.chunk_notes);
  } else {
    result = arrange_optimal(piece, config, params);
  }
  result.source_id = piece.source_id;
  save_interchange(a.out, result);
  return 0;
}

struct PostprocessArgs {
  std::string input;
  std::string estimated;
  std::size_t window = 5;
  bool no_overlap = false;
  std::string out;
};

int run_postprocess(const PostprocessArgs& a) {
  const Piece input = load_interchange(a.input);
  Piece estimated = load_interchange(a.estimated);
  if (!a.no_overlap) estimated = postprocess_overlap(estimated);
  Piece result = postprocess_neighbor_search(input, estimated, input.config, a.window);
  save_interchange(a.out, result);
  return 0;
}

struct EncodeArgs {
  std::vector<std::string> inputs;
  std::string encoding = "v3";
  bool conditioned = false;
  std::size_t max_len = 512;
  std::string out;
};

int run_encode(const EncodeArgs& a) {
  const EncodingId enc = *parse_encoding(a.encoding);
  const fs::path out_dir(a.out);
  std::vector<TokenSequence> corpus;
  for (const auto& input : a.inputs) {
    const Piece piece = load_interchange(input);
    const std::string stem = piece_stem(input);
    std::vector<TokenSequence> src;
    std::vector<TokenSequence> tgt;
    if (piece.annotated()) {
      for (auto& chunk : split_sequences(encode(piece, enc, a.conditioned), a.max_len)) {
        src.push_back(std::move(chunk.input));
        tgt.push_back(std::move(chunk.target));
      }
      write_file_atomic(out_dir / (stem + ".tgt"), join_lines(tgt));
    } else {
      src = split_input(encode_input(piece, enc, a.conditioned), a.max_len);
    }
    write_file_atomic(out_dir / (stem + ".src"), join_lines(src));
    corpus.insert(corpus.end(), src.begin(), src.end());
    corpus.insert(corpus.end(), tgt.begin(), tgt.end());
  }
  std::ostringstream vocab;
  Vocabulary::build(corpus).write(vocab);
  write_file_atomic(out_dir / "vocab.txt", vocab.str());
  return 0;
}

struct DecodeArgs {
  std::string src;
  std::string tgt;
  std::string encoding = "v3";
  std::string tuning;
  std::optional<int> capo;
  bool lenient = false;
  std::string source_id;
  std::string out;
};

int run_decode(const DecodeArgs& a) {
  const EncodingId enc = *parse_encoding(a.encoding);
  const GuitarConfig config = with_overrides(GuitarConfig{}, a.tuning, a.capo);
  const auto src = read_lines(a.src);
  const auto tgt = read_lines(a.tgt);
  if (src.size() != tgt.size()) {
    throw FormatError("source has " + std::to_string(src.size()) + " lines but target has " +
                          std::to_string(tgt.size()), std::min(src.size(), tgt.size()) + 1);
  }
  Piece result;
  if (a.lenient) {
    result.config = config;
    Tick offset = 0;
    for (std::size_t i = 0; i < src.size(); ++i) {
      const auto input = parse_sequence(src[i], enc, Side::input);
      const auto target = parse_sequence(tgt[i], enc, Side::target, true);
      Piece part = decode_estimated(input, target, enc, config);
      if (i == 0) result.config = part.config;
      for (auto n : part.notes) {
        n.start += offset;
        n.end += offset;
        result.notes.push_back(n);
      }
      offset += sequence_duration(input);
    }
    result.sort_notes();
  } else {
    std::vector<EncodedPair> chunks;
    for (std::size_t i = 0; i < src.size(); ++i) {
      chunks.push_back({parse_sequence(src[i], enc, Side::input), parse_sequence(tgt[i], enc, Side::target)});
    }
    result = decode_chunks(chunks, config);
  }
  result.source_id = a.source_id.empty() ? piece_stem(a.src) : a.source_id;
  save_interchange(a.out, result);
  return 0;
}

struct DatasetArgs {
  std::string input_dir;
  std::vector<double> split{0.8, 0.1, 0.1};
  std::uint64_t seed = 0;
  bool augment_capo = false;
  bool augment_tuning = false;
  std::string encoding = "v3";
  bool conditioned = false;
  std::size_t max_len = 512;
  std::size_t max_test_files = 0;
  unsigned jobs = 1;
  std::string out;
};

int run_dataset(const DatasetArgs& a) {
  if (a.split.size() != 3) throw DomainError("--split needs three fractions");
  DatasetOptions options;
  options.split = {a.split[0], a.split[1], a.split[2], a.seed};
  options.augmentation.seed = a.seed;
  options.encoding = *parse_encoding(a.encoding);
  options.conditioned = a.conditioned;
  options.augment_capo = a.augment_capo;
  options.augment_tuning = a.augment_tuning;
  options.max_len = a.max_len;
  options.max_test_files = a.max_test_files;
  options.jobs = a.jobs;

  const auto files = list_interchange_files(a.input_dir);
  std::vector<Piece> corpus(files.size());
  parallel_for(files.size(), a.jobs, [&](std::size_t i) {
    corpus[i] = load_interchange(files[i]);
    if (corpus[i].source_id.empty()) corpus[i].source_id = files[i].filename().string();
  });
  const Manifest manifest = build_dataset(corpus, a.out, options);
  for (const auto& w : manifest.warnings) std::cerr << "warning: " << w << "\n";
  for (const auto& s : manifest.skipped) std::cerr << "skipped " << s.source_id << ": " << s.reason << "\n";
  for (const auto& [name, count] : manifest.sequences) std::cout << name << "\t" << count << " sequences\n";
  return 0;
}

struct EvaluateArgs {
  std::string reference;
  std::string predicted;
  bool difficulty = false;
  bool no_postprocess = false;
  std::size_t window = 5;
  unsigned jobs = 1;
  std::string out;
};

int run_evaluate(const EvaluateArgs& a) {
  const auto files = list_interchange_files(a.reference);
  std::vector<Piece> references(files.size());
  std::vector<Piece> predictions(files.size());
  parallel_for(files.size(), a.jobs, [&](std::size_t i) {
    references[i] = load_interchange(files[i]);
    if (references[i].source_id.empty()) references[i].source_id = piece_stem(files[i]);
    const fs::path predicted_path = fs::path(a.predicted) / files[i].filename();
    if (!fs::exists(predicted_path)) throw IoError("missing prediction " + predicted_path.string());
    Piece predicted = load_interchange(predicted_path);
    if (!a.no_postprocess) {
      predicted = postprocess_neighbor_search(references[i], postprocess_overlap(predicted), references[i].config,
                                              a.window);
    }
    predictions[i] = std::move(predicted);
  });
  const auto report = make_report("predicted", references, predictions, {}, a.difficulty);
  write_file_atomic(a.out, report_tsv({report}, a.difficulty));
  fs::path summary(a.out);
  summary.replace_extension(".json");
  write_file_atomic(summary, report_json({report}, a.difficulty).dump(2) + "\n");
  std::cout << "pitch_accuracy\t" << format_number(report.pitch_accuracy, 2) << "\n"
            << "tab_accuracy\t" << format_number(report.tab_accuracy, 2) << "\n";
  if (a.difficulty) std::cout << "difficulty\t" << format_number(report.difficulty, 4) << "\n";
  return 0;
}

int run_difficulty(const std::string& input, double alpha) {
  const Piece piece = load_interchange(input);
  DifficultyParams params;
  params.alpha = alpha;
  std::cout << format_number(piece_difficulty(piece, params), 4) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Guitar tablature arrangement, tokenization and evaluation"};
  app.set_config("--config", "", "Read option values from a TOML/INI file");
  app.require_subcommand(1);

  const auto encodings = CLI::IsMember({"v1", "v2", "v3", "v4", "v5"});
  const auto tunings = CLI::IsMember({"standard", "half-step-down", "full-step-down", "drop-d"});

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Extract guitar notes from Standard MIDI Files");
  c_ingest->add_option("midi", ingest.inputs, "MIDI files")->required()->check(CLI::ExistingFile);
  c_ingest->add_option("--out", ingest.out, "Output directory")->required();
  c_ingest->add_option("--filter-programs", ingest.programs, "General MIDI programs (1-based)")->delimiter(',');
  c_ingest->add_option("--keywords", ingest.keywords, "Track-name keyword file")->check(CLI::ExistingFile);

  ArrangeArgs arrange;
  auto* c_arrange = app.add_subcommand("arrange", "Assign strings and frets to a note file");
  c_arrange->add_option("input", arrange.input, "Interchange file")->required();
  c_arrange->add_option("--method", arrange.method)->check(CLI::IsMember({"baseline", "astar"}))->capture_default_str();
  c_arrange->add_option("--tuning", arrange.tuning)->check(tunings);
  c_arrange->add_option("--capo", arrange.capo)->check(CLI::Range(0, kMaxCapo));
  c_arrange->add_option("--alpha", arrange.alpha)->check(CLI::NonNegativeNumber)->capture_default_str();
  c_arrange->add_option("--chunk-notes", arrange.chunk_notes, "Arrange in chunks of N note groups (0 = whole piece)");
  c_arrange->add_option("--out", arrange.out)->required();

  PostprocessArgs post;
  auto* c_post = app.add_subcommand("postprocess", "Repair an estimated tablature against its input notes");
  c_post->add_option("input", post.input, "Input notes")->required();
  c_post->add_option("estimated", post.estimated, "Estimated tablature")->required();
  c_post->add_option("--window", post.window)->capture_default_str();
  c_post->add_flag("--no-overlap", post.no_overlap, "Skip same-string overlap correction");
  c_post->add_option("--out", post.out)->required();

  EncodeArgs enc;
  auto* c_encode = app.add_subcommand("encode", "Write token sequences for note files");
  c_encode->add_option("inputs", enc.inputs, "Interchange files")->required();
  c_encode->add_option("--encoding", enc.encoding)->check(encodings)->capture_default_str();
  c_encode->add_flag("--conditioned", enc.conditioned, "Prefix CAPO/TUNING tokens");
  c_encode->add_option("--max-len", enc.max_len)->capture_default_str();
  c_encode->add_option("--out", enc.out)->required();

  DecodeArgs dec;
  auto* c_decode = app.add_subcommand("decode", "Turn token sequences back into a note file");
  c_decode->add_option("src", dec.src, "Source token file")->required();
  c_decode->add_option("tgt", dec.tgt, "Target token file")->required();
  c_decode->add_option("--encoding", dec.encoding)->check(encodings)->capture_default_str();
  c_decode->add_option("--tuning", dec.tuning)->check(tunings);
  c_decode->add_option("--capo", dec.capo)->check(CLI::Range(0, kMaxCapo));
  c_decode->add_flag("--lenient", dec.lenient, "Accept model output with misaligned or invalid tokens");
  c_decode->add_option("--source-id", dec.source_id);
  c_decode->add_option("--out", dec.out)->required();

  DatasetArgs ds;
  auto* c_dataset = app.add_subcommand("dataset", "Build a split, augmented token dataset");
  c_dataset->add_option("input_dir", ds.input_dir, "Directory of interchange files")->required();
  c_dataset->add_option("--split", ds.split, "train,valid,test fractions")->delimiter(',')->expected(3);
  c_dataset->add_option("--seed", ds.seed)->capture_default_str();
  c_dataset->add_flag("--augment-capo", ds.augment_capo);
  c_dataset->add_flag("--augment-tuning", ds.augment_tuning);
  c_dataset->add_option("--encoding", ds.encoding)->check(encodings)->capture_default_str();
  c_dataset->add_flag("--conditioned", ds.conditioned);
  c_dataset->add_option("--max-len", ds.max_len)->capture_default_str();
  c_dataset->add_option("--max-test-files", ds.max_test_files, "Cap on test pieces (0 = all)");
  c_dataset->add_option("--jobs", ds.jobs)->check(CLI::PositiveNumber);
  c_dataset->add_option("--out", ds.out)->required();

  EvaluateArgs ev;
  auto* c_eval = app.add_subcommand("evaluate", "Score predicted tablatures against references");
  c_eval->add_option("--reference", ev.reference)->required();
  c_eval->add_option("--predicted", ev.predicted)->required();
  c_eval->add_flag("--difficulty", ev.difficulty, "Report difficulty scores");
  c_eval->add_flag("--no-postprocess", ev.no_postprocess, "Compare predictions as they are");
  c_eval->add_option("--window", ev.window)->capture_default_str();
  c_eval->add_option("--jobs", ev.jobs)->check(CLI::PositiveNumber);
  c_eval->add_option("--out", ev.out)->required();

  std::string diff_input;
  double diff_alpha = 0.25;
  auto* c_diff = app.add_subcommand("difficulty", "Print the difficulty score of a tablature");
  c_diff->add_option("input", diff_input)->required();
  c_diff->add_option("--alpha", diff_alpha)->check(CLI::NonNegativeNumber)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*c_ingest) return run_ingest(ingest);
    if (*c_arrange) return run_arrange(arrange);
    if (*c_post) return run_postprocess(post);
    if (*c_encode) return run_encode(enc);
    if (*c_decode) return run_decode(dec);
    if (*c_dataset) return run_dataset(ds);
    if (*c_eval) return run_evaluate(ev);
    if (*c_diff) return run_difficulty(diff_input, diff_alpha);
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
