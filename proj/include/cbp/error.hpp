#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cbp {

enum class Errc {
  InvalidInstance,
  NonIncreasingCost,
  NonConvexCost,
  DeteriorationNotZeroAtOff,
  DecreasingRevenue,
  UnstableGrid,
  EmptyHorizon,
  NegativeRateInput,
  OutOfRange,
  NotBangBangSolution,
  IncompatibleGrids,
  InvalidCosts,
  RateOutOfRange,
  DegenerateBaseline,
  EnvelopeViolated,
  NonPositiveOracleMean,
  ActionSpaceTooLarge,
  ConfigError,
  NoInteriorMaximizer,
};

std::string_view to_string(Errc code);

/// Every module reports failures through this exception; `code()` identifies
/// which contract was violated.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace cbp
