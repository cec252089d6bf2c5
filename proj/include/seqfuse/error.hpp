#pragma once

#include <stdexcept>
#include <string>

namespace seqfuse {

enum class ErrorCode {
  // input errors (malformed or inconsistent files and labels)
  UnknownGloss,
  InvalidTokenId,
  ParseError,
  SchemaError,
  MissingPrediction,
  AlphabetMismatch,
  // contract violations (a precondition of an operation does not hold)
  EmptyInput,
  EmptyReference,
  InsufficientData,
  TooFewSamples,
  SingleSubject,
  ShapeMismatch,
  InvalidArgument,
};

const char* to_string(ErrorCode code);

// True for codes that describe bad input data rather than API misuse.
bool is_input_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace seqfuse
