#include "delaycorr/fit.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include "delaycorr/csv.hpp"
#include "delaycorr/errors.hpp"
#include "delaycorr/numeric_format.hpp"
#include "delaycorr/random.hpp"

namespace delaycorr {

namespace {

constexpr double kSurvivalFloor = 1e-300;

double safe_log10(double v) { return std::log10(std::max(v, kSurvivalFloor)); }

}  // namespace

ObjectiveContext ObjectiveContext::make(const DebiasedDistribution& empirical, std::int64_t delta_fix,
                                        std::optional<MixtureParams> previous) {
  if (empirical.cdf.empty()) throw DataError("empty debiased distribution");
  if (empirical.delta_max > delta_fix) {
    throw ValidationError("window delta_max " + std::to_string(empirical.delta_max) + " exceeds delta_fix " +
                          std::to_string(delta_fix));
  }
  ObjectiveContext ctx;
  ctx.delta_max = empirical.delta_max;
  ctx.delta_fix = delta_fix;
  ctx.previous = previous;
  ctx.empirical_cdf.assign(empirical.cdf.begin(), empirical.cdf.begin() + ctx.delta_max + 1);
  for (std::int64_t d = 0; d <= ctx.delta_max; ++d) {
    const double F = ctx.empirical_cdf[static_cast<std::size_t>(d)];
    if (F > 0.0) {
      ctx.fit_lags.push_back(d);
      ctx.fit_log_cdf.push_back(std::log10(F));
    }
  }
  if (previous) {
    const MixtureModel prev{*previous};
    for (std::int64_t d = ctx.delta_max + 1; d <= delta_fix; ++d) {
      ctx.previous_log_survival.push_back(safe_log10(prev.sf(static_cast<double>(d))));
    }
  }
  return ctx;
}

double ObjectiveContext::fit_weight() const {
  if (delta_fix <= 0) return 1.0;
  return static_cast<double>(delta_max) / static_cast<double>(delta_fix);
}

double model_lag_cdf(const MixtureModel& model, std::int64_t lag, std::int64_t delta_max) {
  const double top = model.mass_to(static_cast<double>(delta_max + 1));
  return model.mass_to(static_cast<double>(lag + 1)) / top;
}

ObjectiveTerms evaluate_objective(const MixtureParams& params, const ObjectiveContext& ctx) {
  if (ctx.fit_lags.empty()) throw DataError("no lags with positive empirical CDF; window unusable");
  const MixtureModel model{params};

  ObjectiveTerms t;
  t.fit_weight = ctx.fit_weight();
  t.coupling_weight = 1.0 - t.fit_weight;

  const double top = model.mass_to(static_cast<double>(ctx.delta_max + 1));
  if (!(top > 0.0)) throw ValidationError("model has no mass on [0, delta_max] for " + params.str());
  double sum = 0.0;
  for (std::size_t i = 0; i < ctx.fit_lags.size(); ++i) {
    const double m = model.mass_to(static_cast<double>(ctx.fit_lags[i] + 1)) / top;
    const double diff = safe_log10(m) - ctx.fit_log_cdf[i];
    sum += diff * diff;
  }
  t.fit_term = sum / static_cast<double>(ctx.fit_lags.size());

  if (ctx.previous && !ctx.previous_log_survival.empty()) {
    double s2 = 0.0;
    for (std::size_t i = 0; i < ctx.previous_log_survival.size(); ++i) {
      const double lag = static_cast<double>(ctx.delta_max + 1 + static_cast<std::int64_t>(i));
      const double diff = ctx.previous_log_survival[i] - safe_log10(model.sf(lag));
      s2 += diff * diff;
    }
    t.coupling_term = s2 / static_cast<double>(ctx.previous_log_survival.size());
  }

  const double fn0 = normal_cdf(0.0, params.mu, params.sigma);
  t.negative_penalty = fn0 * fn0;
  const double tail = model.sf(ctx.penalty_horizon);
  t.tail_penalty = tail * tail;

  t.total = ctx.fit_weight_scale * t.fit_weight * t.fit_term +
            ctx.coupling_weight_scale * t.coupling_weight * t.coupling_term + t.negative_penalty + t.tail_penalty;
  return t;
}

double objective(const MixtureParams& params, const ObjectiveContext& ctx) {
  return evaluate_objective(params, ctx).total;
}

ParameterTransform::ParameterTransform(std::int64_t delta_fix, ParameterBounds bounds)
    : mu_unit_{static_cast<double>(std::max<std::int64_t>(delta_fix, 1))}, bounds_{bounds} {}

std::array<double, 4> ParameterTransform::to_search(const MixtureParams& p) const {
  return {std::log(p.alpha / (1.0 - p.alpha)), std::log(p.scale), p.mu / mu_unit_, std::log(p.sigma)};
}

MixtureParams ParameterTransform::from_search(std::span<const double> x) const {
  MixtureParams p;
  p.alpha = 1.0 / (1.0 + std::exp(-x[0]));
  p.scale = std::exp(x[1]);
  p.mu = x[2] * mu_unit_;
  p.sigma = std::exp(x[3]);
  return p;
}

cmaes::Box ParameterTransform::box() const {
  const auto logit = [](double a) { return std::log(a / (1.0 - a)); };
  return {{logit(bounds_.alpha_min), std::log(bounds_.scale_min), bounds_.mu_min_factor, std::log(bounds_.sigma_min)},
          {logit(bounds_.alpha_max), std::log(bounds_.scale_max), bounds_.mu_max_factor, std::log(bounds_.sigma_max)}};
}

MixtureParams ParameterTransform::clamp(MixtureParams p) const {
  p.alpha = std::clamp(p.alpha, bounds_.alpha_min, bounds_.alpha_max);
  p.scale = std::clamp(p.scale, bounds_.scale_min, bounds_.scale_max);
  p.mu = std::clamp(p.mu, bounds_.mu_min_factor * mu_unit_, bounds_.mu_max_factor * mu_unit_);
  p.sigma = std::clamp(p.sigma, bounds_.sigma_min, bounds_.sigma_max);
  return p;
}

MixtureParams initial_guess(const DebiasedDistribution& empirical, std::int64_t delta_fix,
                            const ParameterBounds& bounds) {
  double early = 0.0;
  double short_mass = 0.0, short_sum = 0.0;
  double long_mass = 0.0, long_sum = 0.0, long_sq = 0.0;
  for (std::size_t d = 0; d < empirical.pmf.size(); ++d) {
    const double f = empirical.pmf[d];
    const double x = static_cast<double>(d);
    if (d < 30) early += f;
    if (d < 90) {
      short_mass += f;
      short_sum += f * x;
    } else {
      long_mass += f;
      long_sum += f * x;
      long_sq += f * x * x;
    }
  }
  MixtureParams p;
  p.alpha = early;
  p.scale = short_mass > 0.0 ? short_sum / short_mass : 30.0;
  if (long_mass > 0.0) {
    p.mu = long_sum / long_mass;
    p.sigma = std::sqrt(std::max(0.0, long_sq / long_mass - p.mu * p.mu));
  } else {
    p.mu = std::max<double>(90.0, static_cast<double>(empirical.delta_max));
    p.sigma = std::max(1.0, p.mu / 4.0);
  }
  return ParameterTransform{delta_fix, bounds}.clamp(p);
}

WindowFit fit_window(const ObjectiveContext& ctx, const MixtureParams& init, const FitConfig& config,
                     const Window& window, const FitObservers& observers) {
  const ParameterTransform transform{ctx.delta_fix, config.bounds};
  const auto start = transform.to_search(transform.clamp(init));

  ObjectiveContext weighted = ctx;
  weighted.fit_weight_scale = config.fit_weight_scale;
  weighted.coupling_weight_scale = config.coupling_weight_scale;
  if (weighted.fit_lags.empty()) throw DataError("window " + window.id() + ": no lags with positive empirical CDF");

  const auto f = [&](std::span<const double> x) {
    const MixtureParams p = transform.from_search(x);
    try {
      const ObjectiveTerms terms = evaluate_objective(p, weighted);
      if (observers.on_evaluation) observers.on_evaluation(window, p, terms);
      return terms.total;
    } catch (const ValidationError&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  cmaes::Observer gen_observer;
  if (observers.on_generation) {
    gen_observer = [&](const cmaes::GenerationInfo& info) {
      observers.on_generation(window, TraceRow{info.generation, info.best_value, transform.from_search(info.best_x)});
    };
  }

  cmaes::Result res;
  try {
    res = cmaes::minimize(f, {start.begin(), start.end()}, transform.box(), config.optimizer, gen_observer);
  } catch (const FitError& e) {
    throw FitError("window " + window.id() + ": " + e.what());
  }
  if (!std::isfinite(res.value)) throw FitError("window " + window.id() + ": no finite objective value found");

  WindowFit fit;
  fit.window = window;
  fit.params = transform.from_search(res.x);
  fit.terms = evaluate_objective(fit.params, weighted);
  fit.objective_value = fit.terms.total;
  fit.evaluations = res.evaluations;
  fit.generations = res.generations;
  fit.converged = res.converged();
  fit.sparse = window.sparse;
  return fit;
}

std::vector<WindowFit> fit_all_windows(const std::vector<WindowInput>& inputs, std::int64_t delta_fix,
                                       const FitConfig& config, const FitObservers& observers) {
  std::vector<WindowFit> fits;
  fits.reserve(inputs.size());
  std::optional<MixtureParams> previous;
  std::size_t successes = 0;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const auto& in = inputs[k];
    FitConfig cfg = config;
    cfg.optimizer.seed = Random::derived(config.optimizer.seed, k).next();
    try {
      const auto ctx = ObjectiveContext::make(in.empirical, delta_fix, previous);
      const MixtureParams init = previous ? *previous : initial_guess(in.empirical, delta_fix, config.bounds);
      WindowFit fit = fit_window(ctx, init, cfg, in.window, observers);
      fit.degenerate = in.empirical.degenerate;
      previous = fit.params;
      ++successes;
      fits.push_back(std::move(fit));
    } catch (const std::exception& e) {
      // Data, validation, and optimizer failures all leave the window unfit.
      WindowFit failed;
      failed.window = in.window;
      failed.params = previous.value_or(MixtureParams{});
      failed.sparse = in.window.sparse;
      failed.degenerate = in.empirical.degenerate;
      failed.failed = true;
      failed.message = e.what();
      fits.push_back(std::move(failed));
    }
  }
  if (!inputs.empty() && successes == 0) {
    throw FitError("every window fit failed; first error: " + fits.front().message);
  }
  return fits;
}

void write_parameters_csv(std::ostream& out, const std::vector<WindowFit>& fits) {
  out << "window_end,alpha,scale,mu,sigma,objective,converged\n";
  for (const auto& f : fits) {
    if (f.failed) continue;
    out << f.window.id() << ',' << format_double(f.params.alpha) << ',' << format_double(f.params.scale) << ','
        << format_double(f.params.mu) << ',' << format_double(f.params.sigma) << ','
        << format_double(f.objective_value) << ',' << (f.converged ? 1 : 0) << '\n';
  }
}

std::vector<WindowFit> read_parameters_csv(std::istream& in, const std::string& source) {
  const auto table = csv::read_table(in);
  const auto c_end = table.column("window_end", source);
  const auto c_a = table.column("alpha", source);
  const auto c_s = table.column("scale", source);
  const auto c_m = table.column("mu", source);
  const auto c_g = table.column("sigma", source);
  const auto c_o = table.column("objective", source);
  const auto c_c = table.column("converged", source);
  std::vector<WindowFit> fits;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const auto bad = [&] { return DataError(source + ": bad row " + std::to_string(i + 2)); };
    if (row.size() < table.header.size()) throw bad();
    const auto end = YearMonth::parse(row[c_end]);
    const auto a = parse_double(row[c_a]), s = parse_double(row[c_s]), m = parse_double(row[c_m]),
               g = parse_double(row[c_g]), o = parse_double(row[c_o]);
    if (!end || !a || !s || !m || !g || !o || (row[c_c] != "0" && row[c_c] != "1")) throw bad();
    WindowFit f;
    f.window.end_month = *end;
    f.params = {*a, *s, *m, *g};
    if (!f.params.valid()) throw bad();
    f.objective_value = *o;
    f.converged = row[c_c] == "1";
    fits.push_back(f);
  }
  return fits;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows) {
  out << "generation,best_objective,alpha,scale,mu,sigma\n";
  for (const auto& r : rows) {
    out << r.generation << ',' << format_double(r.best_objective) << ',' << format_double(r.params.alpha) << ','
        << format_double(r.params.scale) << ',' << format_double(r.params.mu) << ','
        << format_double(r.params.sigma) << '\n';
  }
}

}  // namespace delaycorr
