#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace csm {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline constexpr int kTradingDaysPerYear = 252;
inline constexpr int kTradingDaysPerMonth = 21;

inline bool is_missing(double x) { return std::isnan(x); }

/// Malformed input data (CSV rows, config files). Message carries location.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input that parses but violates a domain invariant.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace csm
