#pragma once

#include <stdexcept>
#include <string>

namespace forcelab {

enum class ErrorCode {
  UnknownElement,
  InvalidOrder,
  MissingBottom,
  Membership,
  InvalidInclusion,
  InvalidEmbedding,
  CapExceeded,
  NotSubalgebra,
  ParentMismatch,
  MalformedPartition,
  IndexMismatch,
  ChainPrecondition,
  InvalidTower,
  InvalidWitness,
  HypothesisViolation,
  InvalidParams,
};

const char* to_string(ErrorCode code);

/// Malformed or out-of-range input. Never used to signal a negative verdict.
class InputError : public std::invalid_argument {
 public:
  InputError(ErrorCode code, const std::string& what)
      : std::invalid_argument(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// A precondition of a forcing statement fails (for example the base is not a
/// complete suborder). Kept apart from InputError so callers can tell "the
/// question is ill-posed" from "the answer is no".
class PreconditionError : public std::logic_error {
 public:
  explicit PreconditionError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace forcelab
