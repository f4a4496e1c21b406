#include "delaycorr/cmaes.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <deque>
#include <cmath>
#include <limits>
#include <numeric>

#include "delaycorr/errors.hpp"
#include "delaycorr/random.hpp"

namespace delaycorr::cmaes {

bool Box::contains(std::span<const double> x) const {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lower[i] && x[i] <= upper[i])) return false;
  }
  return true;
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Strategy {
  int n;
  int lambda;
  int mu;
  VectorXd weights;
  double mueff;
  double cc, cs, c1, cmu, damps, chi_n;

  Strategy(int dim, int population) : n{dim} {
    lambda = population > 0 ? population : 4 + static_cast<int>(std::floor(3.0 * std::log(dim)));
    mu = lambda / 2;
    weights.resize(mu);
    for (int i = 0; i < mu; ++i) weights[i] = std::log(mu + 0.5) - std::log(i + 1.0);
    weights /= weights.sum();
    mueff = 1.0 / weights.squaredNorm();
    const double nd = dim;
    cc = (4.0 + mueff / nd) / (nd + 4.0 + 2.0 * mueff / nd);
    cs = (mueff + 2.0) / (nd + mueff + 5.0);
    c1 = 2.0 / ((nd + 1.3) * (nd + 1.3) + mueff);
    cmu = std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / ((nd + 2.0) * (nd + 2.0) + mueff));
    damps = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (nd + 1.0)) - 1.0) + cs;
    chi_n = std::sqrt(nd) * (1.0 - 1.0 / (4.0 * nd) + 1.0 / (21.0 * nd * nd));
  }
};

}  // namespace

Result minimize(const Objective& objective, std::vector<double> start, const Box& box,
                const Config& config, const Observer& observer) {
  const int n = static_cast<int>(start.size());
  if (n == 0) throw ValidationError("CMA-ES needs at least one dimension");
  if (box.lower.size() != start.size() || box.upper.size() != start.size()) {
    throw ValidationError("CMA-ES box dimension does not match the start point");
  }
  if (!box.contains(start)) throw ValidationError("CMA-ES start point lies outside the box");
  if (!(config.initial_step > 0.0)) throw ValidationError("CMA-ES initial step must be positive");

  const Strategy s(n, config.population);
  Random rng{config.seed};

  VectorXd mean = Eigen::Map<const VectorXd>(start.data(), n);
  double sigma = config.initial_step;
  MatrixXd cov = MatrixXd::Identity(n, n);
  MatrixXd basis = MatrixXd::Identity(n, n);
  VectorXd scales = VectorXd::Ones(n);  // sqrt of eigenvalues
  VectorXd path_c = VectorXd::Zero(n);
  VectorXd path_s = VectorXd::Zero(n);

  Result result;
  result.x = start;
  result.value = objective(start);
  result.evaluations = 1;
  if (!std::isfinite(result.value)) result.value = std::numeric_limits<double>::infinity();

  std::deque<double> recent;
  int invalid_streak = 0;

  std::vector<VectorXd> xs(static_cast<std::size_t>(s.lambda), VectorXd(n));
  std::vector<double> values(static_cast<std::size_t>(s.lambda));
  std::vector<int> order(static_cast<std::size_t>(s.lambda));
  std::vector<double> buf(static_cast<std::size_t>(n));

  for (int gen = 0; gen < config.max_generations; ++gen) {
    // Sample the whole population before evaluating anything so the random
    // stream does not depend on objective values.
    for (auto& x : xs) {
      for (int attempt = 0;; ++attempt) {
        VectorXd z(n);
        for (int i = 0; i < n; ++i) z[i] = rng.normal();
        x = mean + sigma * (basis * scales.cwiseProduct(z));
        if (box.contains(std::span<const double>(x.data(), static_cast<std::size_t>(n)))) break;
        if (attempt + 1 >= config.max_resamples) {
          for (int i = 0; i < n; ++i) {
            x[i] = std::clamp(x[i], box.lower[static_cast<std::size_t>(i)], box.upper[static_cast<std::size_t>(i)]);
          }
          break;
        }
      }
    }
    int finite = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      std::copy(xs[k].data(), xs[k].data() + n, buf.begin());
      double v = objective(buf);
      if (std::isfinite(v)) {
        ++finite;
      } else {
        v = std::numeric_limits<double>::infinity();
      }
      values[k] = v;
    }
    result.evaluations += s.lambda;
    result.generations = gen + 1;

    if (finite == 0) {
      if (++invalid_streak >= config.max_invalid_generations) {
        throw FitError("all CMA-ES candidates invalid for " + std::to_string(invalid_streak) +
                       " consecutive generations");
      }
      continue;
    }
    invalid_streak = 0;

    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return values[static_cast<std::size_t>(a)] < values[static_cast<std::size_t>(b)]; });
    const auto& gen_best = xs[static_cast<std::size_t>(order[0])];
    const double gen_best_value = values[static_cast<std::size_t>(order[0])];
    if (gen_best_value < result.value) {
      result.value = gen_best_value;
      result.x.assign(gen_best.data(), gen_best.data() + n);
    }

    // Mean and evolution paths.
    const VectorXd old_mean = mean;
    mean.setZero();
    for (int i = 0; i < s.mu; ++i) mean += s.weights[i] * xs[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
    const VectorXd step = (mean - old_mean) / sigma;

    const MatrixXd inv_sqrt = basis * scales.cwiseInverse().asDiagonal() * basis.transpose();
    path_s = (1.0 - s.cs) * path_s + std::sqrt(s.cs * (2.0 - s.cs) * s.mueff) * (inv_sqrt * step);
    const double ps_norm = path_s.norm();
    const bool hsig = ps_norm / std::sqrt(1.0 - std::pow(1.0 - s.cs, 2.0 * (gen + 1))) / s.chi_n <
                      1.4 + 2.0 / (n + 1.0);
    path_c = (1.0 - s.cc) * path_c + (hsig ? std::sqrt(s.cc * (2.0 - s.cc) * s.mueff) : 0.0) * step;

    MatrixXd rank_mu = MatrixXd::Zero(n, n);
    for (int i = 0; i < s.mu; ++i) {
      const VectorXd y = (xs[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] - old_mean) / sigma;
      rank_mu += s.weights[i] * y * y.transpose();
    }
    const double hsig_correction = hsig ? 0.0 : s.cc * (2.0 - s.cc);
    cov = (1.0 - s.c1 - s.cmu) * cov + s.c1 * (path_c * path_c.transpose() + hsig_correction * cov) +
          s.cmu * rank_mu;
    cov = 0.5 * (cov + cov.transpose());

    sigma *= std::exp((s.cs / s.damps) * (ps_norm / s.chi_n - 1.0));

    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) break;
    basis = eig.eigenvectors();
    scales = eig.eigenvalues().cwiseMax(1e-300).cwiseSqrt();

    if (observer) {
      GenerationInfo info;
      info.generation = gen;
      info.evaluations = result.evaluations;
      info.best_value = result.value;
      info.best_x = result.x;
      info.generation_best_value = gen_best_value;
      info.generation_best_x = std::span<const double>(gen_best.data(), static_cast<std::size_t>(n));
      info.step_size = sigma;
      observer(info);
    }

    if (sigma * scales.maxCoeff() < config.step_tolerance) {
      result.reason = StopReason::kStagnation;
      return result;
    }
    if (config.stagnation_generations > 0) {
      recent.push_back(gen_best_value);
      if (recent.size() > static_cast<std::size_t>(config.stagnation_generations)) recent.pop_front();
      if (recent.size() == static_cast<std::size_t>(config.stagnation_generations)) {
        const auto [lo, hi] = std::minmax_element(recent.begin(), recent.end());
        if (*hi - *lo <= config.stagnation_tolerance * std::fabs(result.value)) {
          result.reason = StopReason::kStagnation;
          return result;
        }
      }
    }
  }
  result.reason = StopReason::kGenerationCap;
  return result;
}

}  // namespace delaycorr::cmaes
