#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "delaycorr/windows.hpp"

namespace delaycorr {

/// Discrete delay distribution corrected for right truncation. `pmf[d]` and
/// `cdf[d]` are defined for lags 0..age_max; cdf[age_max] == 1.
struct DebiasedDistribution {
  std::vector<double> pmf;
  std::vector<double> cdf;
  std::int64_t delta_max = 0;
  std::int64_t age_max = 0;
  /// Set when the recursion needed clamping (CDF ran into the positivity
  /// floor or would have gone negative).
  bool degenerate = false;

  double f(std::int64_t lag) const {
    return lag >= 0 && lag < static_cast<std::int64_t>(pmf.size()) ? pmf[static_cast<std::size_t>(lag)] : 0.0;
  }
};

/// Floor applied to F(a) inside the denominator sum.
inline constexpr double kCdfFloor = 1e-9;

/// Estimates the delay distribution "from the outside in". Walking lags from
/// age_max down to 0,
///
///   f(d)   = h_delay(d) / sum_{a=d}^{age_max} h_age(a) / F(a)
///   F(d-1) = F(d) - f(d)
///
/// with F(age_max) = 1. Each h_age(a) / F(a) term estimates how many events of
/// age a exist in total, reported or not, so the denominator counts events
/// old enough to have shown delay d.
DebiasedDistribution compute_delay_distribution(const DelayHistograms& h);

/// Right-continuous step lookup: F at the largest stored lag <= lag, and 1
/// beyond age_max.
double empirical_cdf_at(const DebiasedDistribution& dist, double lag);

/// `lag,f,F,degenerate_flag`, one row per lag 0..age_max.
void write_distribution_csv(std::ostream& out, const DebiasedDistribution& dist);
DebiasedDistribution read_distribution_csv(std::istream& in, const std::string& source);

}  // namespace delaycorr
