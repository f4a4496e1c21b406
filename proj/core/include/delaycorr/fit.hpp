#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "delaycorr/cmaes.hpp"
#include "delaycorr/debias.hpp"
#include "delaycorr/mixture.hpp"
#include "delaycorr/windows.hpp"

namespace delaycorr {

/// Everything the objective needs for one window. Built with make(), which
/// precomputes the log-CDF grids.
struct ObjectiveContext {
  /// Debiased F at lags 0..delta_max.
  std::vector<double> empirical_cdf;
  std::int64_t delta_max = 0;
  /// Largest delay in the whole data set.
  std::int64_t delta_fix = 0;
  /// Optimum of the previous window; absent for the first window.
  std::optional<MixtureParams> previous;
  double penalty_horizon = 3650.0;
  /// Optional extra multipliers on the two weighted terms.
  double fit_weight_scale = 1.0;
  double coupling_weight_scale = 1.0;

  // Precomputed by make().
  std::vector<std::int64_t> fit_lags;           // lags with F > 0
  std::vector<double> fit_log_cdf;              // log10 F at fit_lags
  std::vector<double> previous_log_survival;    // log10 S_prev at delta_max+1..delta_fix

  static ObjectiveContext make(const DebiasedDistribution& empirical, std::int64_t delta_fix,
                               std::optional<MixtureParams> previous = std::nullopt);

  double fit_weight() const;
  double coupling_weight() const { return 1.0 - fit_weight(); }
};

/// The individual terms of one objective evaluation.
struct ObjectiveTerms {
  double fit_term = 0.0;       // mean squared log10 CDF error on [0, delta_max]
  double coupling_term = 0.0;  // mean squared log10 survival change on (delta_max, delta_fix]
  double fit_weight = 0.0;
  double coupling_weight = 0.0;
  double negative_penalty = 0.0;  // F_N(0)^2
  double tail_penalty = 0.0;      // S(horizon)^2
  double total = 0.0;
};

/// Model CDF for whole-day lag `lag`, i.e. P(delay < lag + 1), truncated to
/// [0, delta_max + 1). Lag d holds continuous delays in [d, d + 1).
double model_lag_cdf(const MixtureModel& model, std::int64_t lag, std::int64_t delta_max);

/// Evaluates the window objective. Throws ValidationError for invalid
/// parameters and DataError when the context has no usable fit lags.
ObjectiveTerms evaluate_objective(const MixtureParams& params, const ObjectiveContext& ctx);
double objective(const MixtureParams& params, const ObjectiveContext& ctx);

/// Box constraints on the mixture parameters; mu bounds are multiples of
/// delta_fix.
struct ParameterBounds {
  double alpha_min = 0.01, alpha_max = 0.99;
  double scale_min = 1.0, scale_max = 2000.0;
  double mu_min_factor = -1.0, mu_max_factor = 2.0;
  double sigma_min = 1.0, sigma_max = 2000.0;
};

/// Maps parameters to the unconstrained search coordinates
/// (logit alpha, ln scale, mu / delta_fix, ln sigma) and back.
class ParameterTransform {
 public:
  explicit ParameterTransform(std::int64_t delta_fix, ParameterBounds bounds = {});

  std::array<double, 4> to_search(const MixtureParams& p) const;
  MixtureParams from_search(std::span<const double> x) const;
  cmaes::Box box() const;
  /// Clamps parameters into the bounds.
  MixtureParams clamp(MixtureParams p) const;

 private:
  double mu_unit_;
  ParameterBounds bounds_;
};

/// Moment-based starting point: alpha from the mass below 30 days, scale from
/// the mean of delays below 90 days, mu and sigma from the moments of delays
/// at or above 90 days. Clamped into the bounds.
MixtureParams initial_guess(const DebiasedDistribution& empirical, std::int64_t delta_fix,
                            const ParameterBounds& bounds = {});

struct FitConfig {
  cmaes::Config optimizer;
  ParameterBounds bounds;
  double fit_weight_scale = 1.0;
  double coupling_weight_scale = 1.0;
};

struct WindowFit {
  Window window;
  MixtureParams params;
  double objective_value = 0.0;
  ObjectiveTerms terms;
  std::int64_t evaluations = 0;
  int generations = 0;
  bool converged = false;
  bool sparse = false;
  bool degenerate = false;
  bool failed = false;
  std::string message;
};

/// One row of a fit trace: best parameters after a generation.
struct TraceRow {
  int generation = 0;
  double best_objective = 0.0;
  MixtureParams params;
};

struct FitObservers {
  std::function<void(const Window&, const TraceRow&)> on_generation;
  std::function<void(const Window&, const MixtureParams&, const ObjectiveTerms&)> on_evaluation;
};

/// Minimizes the objective of one window with CMA-ES started at `init`.
/// Throws FitError when the optimizer gives up.
WindowFit fit_window(const ObjectiveContext& ctx, const MixtureParams& init, const FitConfig& config,
                     const Window& window, const FitObservers& observers = {});

struct WindowInput {
  Window window;
  DebiasedDistribution empirical;
};

/// Fits windows in order, coupling each to the previous successful optimum
/// and starting its search there. The first window starts from
/// initial_guess(). Window k uses a seed derived from (config seed, k).
/// Failed windows are recorded and skipped; throws FitError if none succeeds.
std::vector<WindowFit> fit_all_windows(const std::vector<WindowInput>& inputs, std::int64_t delta_fix,
                                       const FitConfig& config, const FitObservers& observers = {});

/// `window_end,alpha,scale,mu,sigma,objective,converged` for successful fits.
void write_parameters_csv(std::ostream& out, const std::vector<WindowFit>& fits);
std::vector<WindowFit> read_parameters_csv(std::istream& in, const std::string& source);

/// `generation,best_objective,alpha,scale,mu,sigma`.
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows);

}  // namespace delaycorr
