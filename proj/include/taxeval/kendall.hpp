#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace taxeval {

struct KendallResult {
  double tau = 0.0;
  // Two-sided, from the normal approximation with tie-corrected variance.
  // Approximate; NaN when the variance degenerates.
  double p_value = 0.0;
  std::size_t n = 0;
};

// Raw pair counts behind tau-b. Ties are exact floating-point equality.
struct KendallCounts {
  std::int64_t pairs = 0;      // n(n-1)/2
  std::int64_t tied_x = 0;     // pairs tied in x
  std::int64_t tied_y = 0;     // pairs tied in y
  std::int64_t tied_xy = 0;    // pairs tied in both
  std::int64_t discordant = 0;

  std::int64_t concordant_minus_discordant() const {
    return pairs - tied_x - tied_y + tied_xy - 2 * discordant;
  }
};

// O(n log n) (Knight). Throws InputError on length mismatch, n < 2 or NaN.
KendallCounts kendall_counts(std::span<const double> xs, std::span<const double> ys);

// Tau-b. Throws UndefinedMeasure when either list is constant.
KendallResult kendall_tau(std::span<const double> xs, std::span<const double> ys);

}  // namespace taxeval
