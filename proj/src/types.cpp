#include "seqfuse/types.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace seqfuse {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownGloss: return "UnknownGloss";
    case ErrorCode::InvalidTokenId: return "InvalidTokenId";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::MissingPrediction: return "MissingPrediction";
    case ErrorCode::AlphabetMismatch: return "AlphabetMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::EmptyReference: return "EmptyReference";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::SingleSubject: return "SingleSubject";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

bool is_input_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownGloss:
    case ErrorCode::InvalidTokenId:
    case ErrorCode::ParseError:
    case ErrorCode::SchemaError:
    case ErrorCode::MissingPrediction:
    case ErrorCode::AlphabetMismatch:
      return true;
    default:
      return false;
  }
}

namespace {

void check_token(Token t) {
  if (t < 0) {
    throw Error(ErrorCode::InvalidTokenId, "negative token " + std::to_string(t) + " in a gap-free sequence");
  }
}

}  // namespace

Sequence::Sequence(std::initializer_list<Token> tokens) : tokens_(tokens) {
  std::for_each(tokens_.begin(), tokens_.end(), check_token);
}

Sequence::Sequence(std::vector<Token> tokens) : tokens_(std::move(tokens)) {
  std::for_each(tokens_.begin(), tokens_.end(), check_token);
}

void Sequence::push_back(Token t) {
  check_token(t);
  tokens_.push_back(t);
}

Sequence strip_gaps(const AlignedSequence& s) {
  std::vector<Token> out;
  out.reserve(s.size());
  std::copy_if(s.begin(), s.end(), std::back_inserter(out), [](Token t) { return t != kGap; });
  return Sequence(std::move(out));
}

GlossAlphabet::GlossAlphabet(std::vector<std::string> glosses) : glosses_(std::move(glosses)) {
  if (glosses_.empty()) throw Error(ErrorCode::EmptyInput, "alphabet has no glosses");
  for (std::size_t i = 0; i < glosses_.size(); ++i) {
    if (glosses_[i].empty()) throw Error(ErrorCode::SchemaError, "empty gloss at index " + std::to_string(i));
    auto [it, inserted] = index_.emplace(glosses_[i], static_cast<Token>(i));
    if (!inserted) throw Error(ErrorCode::SchemaError, "duplicate gloss '" + glosses_[i] + "'");
  }
}

GlossAlphabet GlossAlphabet::standard() {
  // Declaration order of the similarity-group table; ids are positions here.
  return GlossAlphabet({"Agreement", "Disagreement", "Yesterday", "Father", "Luck", "Year", "is", "Very",
                        "Hopeful", "Summer", "Good", "Day", "Forget", "Mother", "Blue", "Green"});
}

GlossAlphabet GlossAlphabet::from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open alphabet file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  if (!j.is_array()) throw Error(ErrorCode::SchemaError, path.string() + ": expected a JSON array of strings");
  std::vector<std::string> glosses;
  for (const auto& g : j) {
    if (!g.is_string()) throw Error(ErrorCode::SchemaError, path.string() + ": non-string gloss");
    glosses.push_back(g.get<std::string>());
  }
  return GlossAlphabet(std::move(glosses));
}

const std::string& GlossAlphabet::gloss(Token id) const {
  if (!valid(id)) throw Error(ErrorCode::InvalidTokenId, "token id " + std::to_string(id));
  return glosses_[static_cast<std::size_t>(id)];
}

Token GlossAlphabet::id(std::string_view gloss) const {
  auto it = index_.find(std::string(gloss));
  if (it == index_.end()) throw Error(ErrorCode::UnknownGloss, "'" + std::string(gloss) + "'");
  return it->second;
}

bool GlossAlphabet::contains(std::string_view gloss) const {
  return index_.find(std::string(gloss)) != index_.end();
}

std::string GlossAlphabet::to_json() const { return nlohmann::json(glosses_).dump(); }

Sequence encode(std::span<const std::string> labels, const GlossAlphabet& alphabet) {
  std::vector<Token> tokens;
  tokens.reserve(labels.size());
  for (const auto& label : labels) tokens.push_back(alphabet.id(label));
  return Sequence(std::move(tokens));
}

std::vector<std::string> decode(const Sequence& seq, const GlossAlphabet& alphabet) {
  std::vector<std::string> out;
  out.reserve(seq.size());
  for (Token t : seq) out.push_back(alphabet.gloss(t));
  return out;
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::istringstream in{std::string(text)};
  for (std::string w; in >> w;) words.push_back(std::move(w));
  return words;
}

}  // namespace seqfuse
