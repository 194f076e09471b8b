#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rlflow {

enum class ErrorCode {
  MalformedLine,
  InvariantViolation,
  DuplicateInstitution,
  CoordinateOutOfRange,
  UnknownInstitution,
  MissingNsfcCount,
  ZeroVector,
  NonFiniteRegressor,
  EmptyCorpus,
  InvalidHyperparameter,
  RankDeficient,
  AllCensored,
  NonConvergence,
  NonIntegerResponse,
  NoZeros,
  MismatchedObservations,
  FamilyMismatch,
  RegressorMismatch,
  DegenerateSample,
  InvalidArgument,
  Io,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this type; `code()` identifies
// the condition and `what()` carries a human-readable detail.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code), detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

private:
  ErrorCode code_;
  std::string detail_;
};

// Line-numbered parse failure (1-based line numbers).
class ParseError : public Error {
public:
  ParseError(std::size_t line_no, const std::string& reason)
      : Error(ErrorCode::MalformedLine, "line " + std::to_string(line_no) + ": " + reason),
        line_no_(line_no) {}

  std::size_t line_no() const noexcept { return line_no_; }

private:
  std::size_t line_no_;
};

// Thrown when the optimizer gives up; carries the last iterate's state.
class ConvergenceError : public Error {
public:
  ConvergenceError(int iterations, double gradient_norm)
      : Error(ErrorCode::NonConvergence, "after " + std::to_string(iterations) +
                                             " iterations, gradient norm " +
                                             std::to_string(gradient_norm)),
        iterations_(iterations), gradient_norm_(gradient_norm) {}

  int iterations() const noexcept { return iterations_; }
  double gradient_norm() const noexcept { return gradient_norm_; }

private:
  int iterations_;
  double gradient_norm_;
};

}  // namespace rlflow
