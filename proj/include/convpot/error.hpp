#pragma once

#include <stdexcept>
#include <string>

namespace convpot {

/// Failure categories shared by every module. The numeric values are part of
/// the C API (see capi.h) and must stay stable.
enum class ErrorCode : int {
  Ok = 0,
  InvalidArgument = 1,
  NonConvex = 2,
  Degenerate = 3,
  NoConvergence = 4,
  ParameterSolveFailed = 5,
  OutsideDomainOfDefinition = 6,
  QuadratureBudgetExceeded = 7,
  BreakdownAtDegree = 8,
  EigenFailure = 9,
  ExteriorZero = 10,
  GridMismatch = 11,
  SingularEvaluation = 12,
  LawsonStall = 13,
  InsufficientData = 14,
  ConfigError = 15,
  IoError = 16,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised when the Arnoldi pivot collapses; carries the offending degree.
class BreakdownError : public Error {
 public:
  BreakdownError(int degree, double pivot)
      : Error(ErrorCode::BreakdownAtDegree,
              "normalization pivot " + std::to_string(pivot) + " at degree " +
                  std::to_string(degree)),
        degree_(degree) {}

  int degree() const noexcept { return degree_; }

 private:
  int degree_;
};

}  // namespace convpot
