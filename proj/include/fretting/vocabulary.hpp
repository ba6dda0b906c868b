#pragma once

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "fretting/tokens.hpp"

namespace fretting {

/// Word-level vocabulary. Ids 0..3 are PAD, BOS, EOS, UNK; the remaining
/// tokens follow in sorted text order.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;
  static constexpr int kUnk = 3;

  Vocabulary() : Vocabulary(std::vector<std::string>{}) {}

  static Vocabulary build(const std::vector<TokenSequence>& corpus) {
    std::set<std::string> words;
    for (const auto& seq : corpus) {
      for (const auto& tok : seq.tokens) {
        if (!tok.is_special()) words.insert(to_string(tok));
      }
    }
    return Vocabulary(std::vector<std::string>(words.begin(), words.end()));
  }

  /// Reads the one-token-per-line file format; line number is the id.
  static Vocabulary read(std::istream& in) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
    const auto specials = special_words();
    if (lines.size() < specials.size() || !std::equal(specials.begin(), specials.end(), lines.begin())) {
      throw FormatError("vocabulary must start with PAD, BOS, EOS, UNK", 0);
    }
    Vocabulary v;
    v.words_ = lines;
    v.ids_.clear();
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (!v.ids_.emplace(lines[i], static_cast<int>(i)).second) {
        throw FormatError("duplicate vocabulary entry at line " + std::to_string(i + 1), i + 1);
      }
    }
    return v;
  }

  void write(std::ostream& out) const {
    for (const auto& w : words_) out << w << '\n';
  }

  std::size_t size() const noexcept { return words_.size(); }

  int id(const std::string& word) const {
    const auto it = ids_.find(word);
    return it == ids_.end() ? kUnk : it->second;
  }

  const std::string& word(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= words_.size()) return words_[kUnk];
    return words_[static_cast<std::size_t>(id)];
  }

  std::vector<int> apply(const TokenSequence& seq) const {
    std::vector<int> ids;
    ids.reserve(seq.tokens.size());
    for (const auto& tok : seq.tokens) ids.push_back(id(to_string(tok)));
    return ids;
  }

  TokenSequence invert(const std::vector<int>& ids, EncodingId enc, Side side) const {
    TokenSequence seq{enc, side, {}};
    for (int i : ids) seq.tokens.push_back(parse_token(word(i)).value_or(Token::unk()));
    return seq;
  }

  bool operator==(const Vocabulary& other) const { return words_ == other.words_; }

 private:
  explicit Vocabulary(std::vector<std::string> sorted_words) {
    words_ = special_words();
    words_.insert(words_.end(), sorted_words.begin(), sorted_words.end());
    for (std::size_t i = 0; i < words_.size(); ++i) ids_.emplace(words_[i], static_cast<int>(i));
  }

  static std::vector<std::string> special_words() { return {"PAD", "BOS", "EOS", "UNK"}; }

  std::vector<std::string> words_;
  std::unordered_map<std::string, int> ids_;
};

}  // namespace fretting
