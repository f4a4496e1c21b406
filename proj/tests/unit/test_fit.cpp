#include "doctest.h"

#include <cmath>
#include <sstream>

#include "delaycorr/errors.hpp"
#include "delaycorr/fit.hpp"
#include "delaycorr/random.hpp"

using namespace delaycorr;

namespace {

const MixtureParams kTruth{0.15, 60.0, 400.0, 80.0};

DebiasedDistribution exact_distribution(const MixtureParams& p, std::int64_t dmax) {
  const MixtureModel model{p};
  DebiasedDistribution d;
  d.delta_max = dmax;
  d.age_max = dmax;
  double prev = 0.0;
  for (std::int64_t lag = 0; lag <= dmax; ++lag) {
    const double F = model_lag_cdf(model, lag, dmax);
    d.cdf.push_back(F);
    d.pmf.push_back(F - prev);
    prev = F;
  }
  return d;
}

Window window_ending(int year, unsigned month) {
  Window w;
  w.end_month = YearMonth{year, month};
  w.start = w.end_month.plus(-23).first_day();
  w.end = w.end_month.last_day();
  return w;
}

FitConfig seeded(std::uint64_t seed) {
  FitConfig cfg;
  cfg.optimizer.seed = seed;
  return cfg;
}

}  // namespace

TEST_SUITE("fit") {

TEST_CASE("perfect fit leaves only the penalties") {
  const MixtureParams p{0.5, 100.0, 300.0, 50.0};
  const auto ctx = ObjectiveContext::make(exact_distribution(p, 700), 900);
  const auto t = evaluate_objective(p, ctx);
  CHECK(t.fit_term < 1e-24);
  CHECK(t.coupling_term == 0.0);
  CHECK(t.total < 1e-17);
  CHECK(t.negative_penalty == doctest::Approx(9.865876450376981407e-10 * 9.865876450376981407e-10).epsilon(1e-10));
}

TEST_CASE("identical previous parameters give zero coupling") {
  const MixtureParams p{0.3, 80.0, 250.0, 90.0};
  const auto ctx = ObjectiveContext::make(exact_distribution(p, 500), 1200, p);
  CHECK(evaluate_objective(p, ctx).coupling_term == 0.0);
  CHECK(evaluate_objective({0.3, 80.0, 260.0, 90.0}, ctx).coupling_term > 0.0);
}

TEST_CASE("negative-delay penalty dominates for a negative mean") {
  const MixtureParams p{0.5, 100.0, -200.0, 50.0};
  const auto ctx = ObjectiveContext::make(exact_distribution({0.5, 100.0, 300.0, 50.0}, 700), 900);
  const auto t = evaluate_objective(p, ctx);
  CHECK(t.negative_penalty == doctest::Approx(0.99993665851940131941).epsilon(1e-12));
  CHECK(t.total >= t.negative_penalty);
}

TEST_CASE("weights telescope") {
  const auto dist = exact_distribution(kTruth, 600);
  for (std::int64_t fix : {600, 700, 1200, 5000}) {
    const auto ctx = ObjectiveContext::make(dist, fix);
    const auto t = evaluate_objective(kTruth, ctx);
    CHECK(t.fit_weight + t.coupling_weight == 1.0);
    CHECK(t.fit_weight == doctest::Approx(600.0 / static_cast<double>(fix)));
  }
  CHECK_THROWS_AS(ObjectiveContext::make(dist, 599), ValidationError);
}

TEST_CASE("lags with zero empirical cdf are skipped") {
  auto dist = exact_distribution(kTruth, 300);
  dist.cdf[0] = 0.0;
  dist.cdf[1] = 0.0;
  const auto ctx = ObjectiveContext::make(dist, 900);
  CHECK(ctx.fit_lags.front() == 2);
  CHECK(ctx.fit_lags.size() == 299);
  CHECK(std::isfinite(objective(kTruth, ctx)));
}

TEST_CASE("transform round trip and box") {
  const ParameterTransform tr{1500};
  const auto x = tr.to_search(kTruth);
  const auto back = tr.from_search(x);
  CHECK(back.alpha == doctest::Approx(kTruth.alpha).epsilon(1e-14));
  CHECK(back.scale == doctest::Approx(kTruth.scale).epsilon(1e-14));
  CHECK(back.mu == doctest::Approx(kTruth.mu).epsilon(1e-14));
  CHECK(back.sigma == doctest::Approx(kTruth.sigma).epsilon(1e-14));
  CHECK(tr.box().contains(x));
  const auto c = tr.clamp({0.999, 0.1, 1e5, 1e5});
  CHECK(c.alpha == 0.99);
  CHECK(c.scale == 1.0);
  CHECK(c.mu == 3000.0);
  CHECK(c.sigma == 2000.0);
}

TEST_CASE("recovers parameters from an exact distribution") {
  const auto ctx = ObjectiveContext::make(exact_distribution(kTruth, 900), 900);
  const auto dist = exact_distribution(kTruth, 900);
  const auto fit = fit_window(ctx, initial_guess(dist, 900), seeded(2), window_ending(2018, 12));
  CHECK_FALSE(fit.failed);
  CHECK(fit.converged);
  CHECK(fit.params.alpha == doctest::Approx(kTruth.alpha).epsilon(0.01));
  CHECK(fit.params.scale == doctest::Approx(kTruth.scale).epsilon(0.01));
  CHECK(fit.params.mu == doctest::Approx(kTruth.mu).epsilon(0.01));
  CHECK(fit.params.sigma == doctest::Approx(kTruth.sigma).epsilon(0.01));
  CHECK(fit.objective_value <= objective(kTruth, ctx));
}

TEST_CASE("fits are reproducible") {
  const auto dist = exact_distribution({0.2, 40.0, 300.0, 60.0}, 700);
  const auto ctx = ObjectiveContext::make(dist, 800);
  const auto a = fit_window(ctx, initial_guess(dist, 800), seeded(9), window_ending(2018, 1));
  const auto b = fit_window(ctx, initial_guess(dist, 800), seeded(9), window_ending(2018, 1));
  CHECK(a.params == b.params);
  CHECK(a.objective_value == b.objective_value);
  CHECK(a.evaluations == b.evaluations);
}

TEST_CASE("single window never sees a coupling term") {
  const auto dist = exact_distribution(kTruth, 700);
  FitObservers obs;
  long evaluations = 0, nonzero = 0;
  obs.on_evaluation = [&](const Window&, const MixtureParams&, const ObjectiveTerms& t) {
    ++evaluations;
    if (t.coupling_term != 0.0) ++nonzero;
  };
  const auto fits = fit_all_windows({{window_ending(2018, 12), dist}}, 1500, seeded(1), obs);
  REQUIRE(fits.size() == 1);
  CHECK(evaluations > 100);
  CHECK(nonzero == 0);
}

TEST_CASE("duplicated window keeps its parameters") {
  const auto dist = exact_distribution(kTruth, 700);
  const auto fits =
      fit_all_windows({{window_ending(2018, 11), dist}, {window_ending(2018, 12), dist}}, 1500, seeded(1));
  REQUIRE(fits.size() == 2);
  CHECK(fits[1].params.alpha == doctest::Approx(fits[0].params.alpha).epsilon(1e-3));
  CHECK(fits[1].params.scale == doctest::Approx(fits[0].params.scale).epsilon(1e-3));
  CHECK(fits[1].params.mu == doctest::Approx(fits[0].params.mu).epsilon(1e-3));
  CHECK(fits[1].params.sigma == doctest::Approx(fits[0].params.sigma).epsilon(1e-3));
}

TEST_CASE("stationary windows give flat trajectories") {
  std::vector<WindowInput> inputs;
  Random rng{17};
  for (unsigned m = 1; m <= 12; ++m) {
    // Perturb the truth a little per window to mimic sampling noise.
    MixtureParams p = kTruth;
    p.alpha *= 1.0 + 0.02 * (rng.uniform() - 0.5);
    p.mu *= 1.0 + 0.02 * (rng.uniform() - 0.5);
    inputs.push_back({window_ending(2018, m), exact_distribution(p, 700 + static_cast<std::int64_t>(m))});
  }
  const auto fits = fit_all_windows(inputs, 1200, seeded(4));
  for (const auto& f : fits) {
    CHECK_FALSE(f.failed);
    CHECK(f.params.alpha == doctest::Approx(kTruth.alpha).epsilon(0.05));
    CHECK(f.params.mu == doctest::Approx(kTruth.mu).epsilon(0.05));
    CHECK(f.params.sigma == doctest::Approx(kTruth.sigma).epsilon(0.2));
    CHECK(f.params.scale == doctest::Approx(kTruth.scale).epsilon(0.2));
  }
}

TEST_CASE("parameters csv round trip") {
  const auto dist = exact_distribution(kTruth, 500);
  auto fits = fit_all_windows({{window_ending(2018, 12), dist}}, 600, seeded(1));
  std::ostringstream out;
  write_parameters_csv(out, fits);
  std::istringstream in(out.str());
  const auto back = read_parameters_csv(in, "mem");
  REQUIRE(back.size() == 1);
  CHECK(back[0].params == fits[0].params);
  CHECK(back[0].window.end_month == fits[0].window.end_month);
  CHECK(back[0].converged == fits[0].converged);
}

}
