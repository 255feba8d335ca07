#pragma once

#include <cstddef>
#include <vector>

namespace fastlim {

struct RateSample {
  double eps = 0;
  double residual = 0;
};

struct RateReport {
  std::vector<RateSample> samples; // sorted by eps descending
  std::vector<bool> used;          // per-sample: participated in the fit
  double slope = 0;                // d log(residual) / d log(eps)
  double intercept = 0;            // in natural-log coordinates
  double r_squared = 0;
  bool plateau_detected = false;
  std::size_t fit_count = 0;
};

// Least-squares line through (log eps, log residual). With drop_plateau the
// smallest-eps tail where the residual stops decreasing by more than 5% per
// decade is excluded before fitting. Requires >= 3 usable samples.
RateReport fit_rate(std::vector<RateSample> samples, bool drop_plateau);

} // namespace fastlim
