#include "delaycorr/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "delaycorr/errors.hpp"
#include "delaycorr/numeric_format.hpp"

namespace delaycorr {

namespace {

constexpr double kMinNormalizer = 1e-12;

double exp_cdf(double x, double scale) { return x <= 0.0 ? 0.0 : -std::expm1(-x / scale); }
double exp_sf(double x, double scale) { return x <= 0.0 ? 1.0 : std::exp(-x / scale); }

// Mass of the renormalized numerator on [0, x].
double numerator(const MixtureParams& p, double x) {
  if (x <= 0.0) return 0.0;
  // Take F_N(x) - F_N(0) as a difference of whichever tails are small at both
  // points, so that neither term cancels catastrophically.
  const double normal_part = (p.mu > 0.0 && x <= p.mu)
                                 ? normal_cdf(x, p.mu, p.sigma) - normal_cdf(0.0, p.mu, p.sigma)
                                 : normal_sf(0.0, p.mu, p.sigma) - normal_sf(x, p.mu, p.sigma);
  return p.alpha * exp_cdf(x, p.scale) + (1.0 - p.alpha) * normal_part;
}

}  // namespace

bool MixtureParams::valid() const {
  return alpha > 0.0 && alpha < 1.0 && scale > 0.0 && sigma > 0.0 && std::isfinite(mu) &&
         std::isfinite(scale) && std::isfinite(sigma);
}

void MixtureParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1), got " + format_double(alpha));
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ValidationError("scale must be positive, got " + format_double(scale));
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ValidationError("sigma must be positive, got " + format_double(sigma));
  if (!std::isfinite(mu)) throw ValidationError("mu must be finite");
}

std::string MixtureParams::str() const {
  return "(alpha=" + format_double(alpha) + ", scale=" + format_double(scale) + ", mu=" + format_double(mu) +
         ", sigma=" + format_double(sigma) + ")";
}

double normal_cdf(double x, double mu, double sigma) {
  return 0.5 * std::erfc(-(x - mu) / (sigma * std::numbers::sqrt2));
}

double normal_sf(double x, double mu, double sigma) {
  return 0.5 * std::erfc((x - mu) / (sigma * std::numbers::sqrt2));
}

double mixture_normalizer(const MixtureParams& p) {
  return p.alpha + (1.0 - p.alpha) * normal_sf(0.0, p.mu, p.sigma);
}

double raw_mixture_cdf(const MixtureParams& p, double delay) {
  p.validate();
  return p.alpha * exp_cdf(delay, p.scale) + (1.0 - p.alpha) * normal_cdf(delay, p.mu, p.sigma);
}

MixtureModel::MixtureModel(const MixtureParams& p) : p_{p} {
  p_.validate();
  normalizer_ = mixture_normalizer(p_);
  if (normalizer_ < kMinNormalizer) throw ValidationError("degenerate mixture parameters " + p_.str());
}

double MixtureModel::mass_to(double delay) const { return numerator(p_, delay); }

double MixtureModel::cdf(double delay) const { return std::min(1.0, numerator(p_, delay) / normalizer_); }

double MixtureModel::sf(double delay) const {
  if (delay <= 0.0) return 1.0;
  return (p_.alpha * exp_sf(delay, p_.scale) + (1.0 - p_.alpha) * normal_sf(delay, p_.mu, p_.sigma)) /
         normalizer_;
}

double renormalized_cdf(const MixtureParams& p, double delay) { return MixtureModel{p}.cdf(delay); }

double truncated_cdf(const MixtureParams& p, double delay, double delta_max) {
  p.validate();
  if (delay > delta_max) {
    throw ValidationError("delay " + format_double(delay) + " exceeds truncation point " + format_double(delta_max));
  }
  const double z = numerator(p, delta_max);
  if (z < kMinNormalizer) throw ValidationError("degenerate mixture parameters " + p.str());
  return numerator(p, delay) / z;
}

double survival(const MixtureParams& p, double delay) { return MixtureModel{p}.sf(delay); }

}  // namespace delaycorr
