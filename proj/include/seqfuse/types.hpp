#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "seqfuse/error.hpp"

namespace seqfuse {

using Token = std::int32_t;

// Alignment gap. Lives outside the CTC class space so it can never alias BLANK.
inline constexpr Token kGap = -1;

// A gloss sequence: token ids, never GAP.
class Sequence {
 public:
  Sequence() = default;
  Sequence(std::initializer_list<Token> tokens);
  explicit Sequence(std::vector<Token> tokens);

  std::span<const Token> tokens() const noexcept { return tokens_; }
  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }
  Token operator[](std::size_t i) const { return tokens_[i]; }
  auto begin() const noexcept { return tokens_.begin(); }
  auto end() const noexcept { return tokens_.end(); }

  void push_back(Token t);

  friend bool operator==(const Sequence&, const Sequence&) = default;

 private:
  std::vector<Token> tokens_;
};

// A row of a pairwise or multiple alignment; may contain kGap.
class AlignedSequence {
 public:
  AlignedSequence() = default;
  AlignedSequence(std::initializer_list<Token> tokens) : tokens_(tokens) {}
  explicit AlignedSequence(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  std::span<const Token> tokens() const noexcept { return tokens_; }
  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }
  Token operator[](std::size_t i) const { return tokens_[i]; }
  auto begin() const noexcept { return tokens_.begin(); }
  auto end() const noexcept { return tokens_.end(); }

  void push_back(Token t) { tokens_.push_back(t); }

  friend bool operator==(const AlignedSequence&, const AlignedSequence&) = default;

 private:
  std::vector<Token> tokens_;
};

Sequence strip_gaps(const AlignedSequence& s);

// Match/mismatch/gap scores for global alignment. Defaults are the values the
// ensembling was tuned with.
struct ScoringScheme {
  int match = 0;
  int mismatch = -1;
  int gap = -1;

  int substitution(Token a, Token b) const noexcept { return a == b ? match : mismatch; }

  // match should dominate both penalties; other triples are accepted but suspicious.
  bool is_sane() const noexcept { return match >= mismatch && match >= gap; }

  friend bool operator==(const ScoringScheme&, const ScoringScheme&) = default;
};

// Ordered gloss vocabulary. Ids follow declaration order; BLANK is the id right
// after the last gloss.
class GlossAlphabet {
 public:
  explicit GlossAlphabet(std::vector<std::string> glosses);

  // The sixteen glosses of the published sign-language corpus.
  static GlossAlphabet standard();
  static GlossAlphabet from_json_file(const std::filesystem::path& path);

  std::size_t size() const noexcept { return glosses_.size(); }
  Token blank() const noexcept { return static_cast<Token>(glosses_.size()); }
  // Gloss classes plus BLANK.
  std::size_t num_ctc_classes() const noexcept { return glosses_.size() + 1; }

  const std::vector<std::string>& glosses() const noexcept { return glosses_; }
  const std::string& gloss(Token id) const;
  Token id(std::string_view gloss) const;
  bool contains(std::string_view gloss) const;
  bool valid(Token id) const noexcept { return id >= 0 && id < blank(); }

  std::string to_json() const;

  friend bool operator==(const GlossAlphabet& a, const GlossAlphabet& b) {
    return a.glosses_ == b.glosses_;
  }

 private:
  std::vector<std::string> glosses_;
  std::unordered_map<std::string, Token> index_;
};

Sequence encode(std::span<const std::string> labels, const GlossAlphabet& alphabet);
std::vector<std::string> decode(const Sequence& seq, const GlossAlphabet& alphabet);

// Splits on ASCII whitespace.
std::vector<std::string> split_words(std::string_view text);

}  // namespace seqfuse
