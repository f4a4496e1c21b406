#pragma once

#include <string>

namespace delaycorr {

/// Exponential + normal delay mixture. `scale` is the exponential mean in
/// days; `alpha` weights the exponential ("discovered right away") part.
struct MixtureParams {
  double alpha = 0.5;
  double scale = 100.0;
  double mu = 300.0;
  double sigma = 50.0;

  bool valid() const;
  /// Throws ValidationError naming the offending field.
  void validate() const;
  std::string str() const;

  friend bool operator==(const MixtureParams&, const MixtureParams&) = default;
};

/// P(X <= x) for X ~ N(mu, sigma^2); accurate in both tails.
double normal_cdf(double x, double mu, double sigma);
/// P(X > x) for X ~ N(mu, sigma^2), computed without cancellation.
double normal_sf(double x, double mu, double sigma);

/// alpha * F_exp(d) + (1 - alpha) * F_normal(d), on the whole real line.
double raw_mixture_cdf(const MixtureParams& p, double delay);

/// Mixture CDF with the normal part truncated to [0, inf) and renormalized.
/// This is the model used for corrections.
double renormalized_cdf(const MixtureParams& p, double delay);

/// The renormalized mixture restricted to [0, delta_max]; equals 1 at
/// delta_max. Throws ValidationError when delay > delta_max.
double truncated_cdf(const MixtureParams& p, double delay, double delta_max);

/// 1 - renormalized_cdf, evaluated from upper tails so that values far below
/// machine epsilon keep their relative accuracy.
double survival(const MixtureParams& p, double delay);

/// Normalizer of the renormalized mixture: alpha + (1 - alpha) P(N > 0).
double mixture_normalizer(const MixtureParams& p);

/// Validated parameters with the normalizer precomputed, for evaluating many
/// lags of one model.
class MixtureModel {
 public:
  /// Throws ValidationError for invalid or degenerate parameters.
  explicit MixtureModel(const MixtureParams& p);

  const MixtureParams& params() const { return p_; }
  /// Unnormalized mass on [0, delay].
  double mass_to(double delay) const;
  double cdf(double delay) const;
  double sf(double delay) const;

 private:
  MixtureParams p_;
  double normalizer_;
};

}  // namespace delaycorr
