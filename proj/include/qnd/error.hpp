#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qnd {

enum class ErrorKind {
  Parse,               // malformed user input (state specs, CSV files)
  GridTooNarrow,       // support of a state leaks past the grid edges
  GridMismatch,        // operands live on different grids
  NonpositiveVariance,
  NonpositiveWidth,
  DegeneratePhase,     // phi outside (0, pi/2) with margin
  NullOutcome,         // conditioning on an outcome with p(x0) below threshold
  ResourceLimit,
  InvalidBracket,
  NonFiniteObjective,
  NoSignChange,
  OutOfRangePhase,
  ZeroCount,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace qnd
