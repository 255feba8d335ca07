#include "fastlim/rate_fit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fastlim {

RateReport fit_rate(std::vector<RateSample> samples, bool drop_plateau) {
  if (samples.size() < 3) throw std::invalid_argument("fit_rate: need at least 3 samples");
  for (const RateSample& s : samples) {
    if (!(s.eps > 0) || !(s.residual > 0)) {
      throw std::invalid_argument("fit_rate: samples must have positive eps and residual");
    }
  }
  std::sort(samples.begin(), samples.end(),
            [](const RateSample& a, const RateSample& b) { return a.eps > b.eps; });

  RateReport rep;
  rep.samples = samples;
  rep.used.assign(samples.size(), true);

  std::size_t cut = samples.size();
  if (drop_plateau) {
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
      const double decades = std::log10(samples[i].eps / samples[i + 1].eps);
      if (decades <= 0) continue;
      // Keep the next point only if the residual still drops by at least 5%
      // per decade of eps; otherwise the grid-error floor has been reached.
      const double required = samples[i].residual * std::pow(0.95, decades);
      if (!(samples[i + 1].residual <= required)) {
        cut = i + 1;
        rep.plateau_detected = true;
        break;
      }
    }
    for (std::size_t i = cut; i < samples.size(); ++i) rep.used[i] = false;
  }

  if (cut < 3) throw std::runtime_error("fit_rate: fewer than 3 usable samples after plateau removal");
  rep.fit_count = cut;

  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < cut; ++i) {
    sx += std::log(samples[i].eps);
    sy += std::log(samples[i].residual);
  }
  const double mx = sx / cut, my = sy / cut;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < cut; ++i) {
    const double dx = std::log(samples[i].eps) - mx;
    const double dy = std::log(samples[i].residual) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0) throw std::runtime_error("fit_rate: degenerate eps values");
  rep.slope = sxy / sxx;
  rep.intercept = my - rep.slope * mx;
  const double ss_res = syy - sxy * sxy / sxx;
  rep.r_squared = (syy > 0) ? 1.0 - ss_res / syy : 1.0;
  return rep;
}

} // namespace fastlim
