#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace delaycorr::cmaes {

/// Axis-aligned feasible region of the search space.
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  bool contains(std::span<const double> x) const;
};

struct Config {
  std::uint64_t seed = 1;
  int max_generations = 500;
  /// Initial step size, in units of the search coordinates.
  double initial_step = 0.3;
  /// Population size; 0 selects 4 + floor(3 ln n).
  int population = 0;
  /// Converged once the per-generation best values of the last
  /// `stagnation_generations` generations span less than
  /// `stagnation_tolerance` times the best value. 0 disables the test.
  int stagnation_generations = 30;
  double stagnation_tolerance = 1e-9;
  /// Converged once sigma times the largest axis length drops below this.
  double step_tolerance = 1e-11;
  /// Out-of-box candidates are redrawn up to this many times, then clamped.
  int max_resamples = 100;
  /// Consecutive generations without a single finite objective value before
  /// the run is abandoned.
  int max_invalid_generations = 10;
};

enum class StopReason { kStagnation, kGenerationCap };

struct GenerationInfo {
  int generation = 0;
  std::int64_t evaluations = 0;
  double best_value = 0.0;
  std::span<const double> best_x;
  /// Best candidate sampled in this generation (before the mean update).
  double generation_best_value = 0.0;
  std::span<const double> generation_best_x;
  double step_size = 0.0;
};

struct Result {
  std::vector<double> x;
  double value = 0.0;
  int generations = 0;
  std::int64_t evaluations = 0;
  StopReason reason = StopReason::kGenerationCap;
  bool converged() const { return reason == StopReason::kStagnation; }
};

using Objective = std::function<double(std::span<const double>)>;
using Observer = std::function<void(const GenerationInfo&)>;

/// (mu/mu_w, lambda)-CMA-ES with rank-one and rank-mu covariance updates and
/// cumulative step-size adaptation. Selection uses only the ranking of
/// objective values; non-finite values rank last. Throws ValidationError when
/// `start` lies outside the box and FitError when every candidate is invalid
/// for `max_invalid_generations` generations in a row.
Result minimize(const Objective& objective, std::vector<double> start, const Box& box,
                const Config& config, const Observer& observer = {});

}  // namespace delaycorr::cmaes
