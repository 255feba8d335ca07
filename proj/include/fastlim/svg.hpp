#pragma once

#include <string>
#include <vector>

#include "fastlim/rate_fit.hpp"

namespace fastlim {

// Self-contained log-log plot of a rate report: sample points (plateau
// points drawn hollow), the fitted line, and reference guide lines with
// slopes 1/2 and 1/6. No external assets; output is byte-deterministic for
// identical input.
std::string emit_rate_plot_svg(const RateReport& report);

// Linear-axis polyline of one series; needs at least 2 points.
std::string emit_timeseries_svg(const std::string& title,
                                const std::vector<double>& t,
                                const std::vector<double>& v);

} // namespace fastlim
