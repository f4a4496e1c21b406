#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "delaycorr/date.hpp"
#include "delaycorr/ingest.hpp"
#include "delaycorr/mixture.hpp"

namespace delaycorr {

/// Monthly occurrence rate over the scenario horizon.
struct RateSpec {
  enum class Kind { kConstant, kLinear, kPiecewise };
  Kind kind = Kind::kConstant;
  double value = 1000.0;           // constant
  double from = 500.0, to = 1500.0;  // linear, first to last month
  /// Piecewise: (first month index, rate) segments, sorted by index.
  std::vector<std::pair<int, double>> segments;

  double at(int month_index, int months) const;
};

struct ScenarioSpec {
  YearMonth start{2015, 1};
  int months = 48;
  RateSpec rate;
  MixtureParams truth{0.15, 60.0, 400.0, 80.0};
  /// Time-varying truth: (first month index, parameters) overrides.
  std::vector<std::pair<int, MixtureParams>> truth_changes;
  /// Defaults to the last day of the horizon.
  std::optional<Date> cutoff;
  std::uint64_t seed = 1;
  /// Poisson monthly counts instead of rounded rates.
  bool poisson = false;

  Date effective_cutoff() const;
  const MixtureParams& truth_at(int month_index) const;
  void validate() const;
};

/// Loads a JSON scenario file. Throws ValidationError on bad content.
ScenarioSpec load_scenario(const std::filesystem::path& path);
ScenarioSpec parse_scenario(const std::string& json_text);

struct SyntheticEvent {
  std::string entity_id;
  Date occurred_on;
  double delay = 0.0;  // continuous draw, days
  Date reported_on;    // occurred_on + floor(delay)
  int month_index = 0;
};

/// Full, untruncated truth behind a synthetic event set.
struct GroundTruth {
  ScenarioSpec spec;
  std::vector<SyntheticEvent> events;
  /// Events occurring in each month, reported or not.
  std::vector<std::int64_t> monthly_totals;

  /// Events visible at `cutoff`: occurred and reported on or before it.
  EventSet observe(Date cutoff) const;
  /// Reported counts per month at `cutoff`.
  std::vector<std::int64_t> reported_counts(Date cutoff) const;
};

/// Draws the scenario: per-month counts, occurrence days uniform within the
/// month, delays by inverse-CDF sampling of the renormalized mixture. Each
/// month has its own stream derived from (seed, month index). Throws
/// DataError if nothing is observed by the cutoff.
std::pair<EventSet, GroundTruth> generate(const ScenarioSpec& spec);

/// Inverts the renormalized mixture CDF by bisection to 1e-9 days.
double sample_delay(const MixtureModel& model, double u);

/// True whole-day lag CDF: P(floor(delay) <= d) = F(d + 1) for d = 0..max_lag.
std::vector<double> lag_cdf(const MixtureParams& params, std::int64_t max_lag);

/// Supremum of |F1 - F2| over a common 1-day grid.
double ks_distance(std::span<const double> f1, std::span<const double> f2);

}  // namespace delaycorr
