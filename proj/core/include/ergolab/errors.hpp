#pragma once

#include <stdexcept>
#include <string>

namespace ergolab {

/// Thrown when the available blocks cannot host an ATQI window for the
/// requested shift (the cumulative block mass never exceeds 2a).
struct NoWitnessError : std::runtime_error {
  explicit NoWitnessError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a coboundary split hits a fixed vector of the orthogonal part
/// that carries a nonzero component of the drift.
struct FixedSpaceObstruction : std::runtime_error {
  explicit FixedSpaceObstruction(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when the odometer truncation does not satisfy the mass conditions
/// the essential-value witness relies on.
struct WitnessUnavailableError : std::runtime_error {
  explicit WitnessUnavailableError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ergolab
