#include "delaycorr/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "delaycorr/errors.hpp"
#include "delaycorr/random.hpp"

namespace delaycorr {

double RateSpec::at(int month_index, int months) const {
  switch (kind) {
    case Kind::kConstant:
      return value;
    case Kind::kLinear:
      if (months <= 1) return from;
      return from + (to - from) * static_cast<double>(month_index) / static_cast<double>(months - 1);
    case Kind::kPiecewise: {
      double r = 0.0;
      for (const auto& [first, v] : segments) {
        if (first <= month_index) r = v;
      }
      return r;
    }
  }
  return 0.0;
}

Date ScenarioSpec::effective_cutoff() const { return cutoff.value_or(start.plus(months - 1).last_day()); }

const MixtureParams& ScenarioSpec::truth_at(int month_index) const {
  const MixtureParams* p = &truth;
  for (const auto& [first, params] : truth_changes) {
    if (first <= month_index) p = &params;
  }
  return *p;
}

void ScenarioSpec::validate() const {
  if (months < 1) throw ValidationError("scenario needs at least one month");
  truth.validate();
  for (const auto& [first, p] : truth_changes) p.validate();
  for (int i = 0; i < months; ++i) {
    const double r = rate.at(i, months);
    if (!(r >= 0.0) || !std::isfinite(r)) throw ValidationError("rate must be non-negative in month " + std::to_string(i));
  }
  if (effective_cutoff() < start.first_day()) throw ValidationError("scenario cutoff precedes the horizon");
}

namespace {

MixtureParams params_from_json(const nlohmann::json& j) {
  MixtureParams p;
  p.alpha = j.at("alpha").get<double>();
  p.scale = j.at("scale").get<double>();
  p.mu = j.at("mu").get<double>();
  p.sigma = j.at("sigma").get<double>();
  return p;
}

YearMonth month_from_json(const nlohmann::json& j, const char* what) {
  const auto m = YearMonth::parse(j.get<std::string>());
  if (!m) throw ValidationError(std::string("bad month in scenario field '") + what + "'");
  return *m;
}

}  // namespace

ScenarioSpec parse_scenario(const std::string& json_text) {
  ScenarioSpec spec;
  try {
    const auto j = nlohmann::json::parse(json_text, nullptr, true, true);
    if (j.contains("start")) spec.start = month_from_json(j["start"], "start");
    if (j.contains("months")) spec.months = j["months"].get<int>();
    if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("poisson")) spec.poisson = j["poisson"].get<bool>();
    if (j.contains("cutoff")) {
      const auto d = parse_date(j["cutoff"].get<std::string>());
      if (!d) throw ValidationError("bad scenario cutoff date");
      spec.cutoff = *d;
    }
    if (j.contains("truth")) spec.truth = params_from_json(j["truth"]);
    if (j.contains("truth_changes")) {
      for (const auto& c : j["truth_changes"]) {
        const int idx = static_cast<int>(spec.start.months_until(month_from_json(c.at("from"), "truth_changes.from")));
        spec.truth_changes.emplace_back(idx, params_from_json(c));
      }
      std::sort(spec.truth_changes.begin(), spec.truth_changes.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
    }
    if (j.contains("rate")) {
      const auto& r = j["rate"];
      const auto kind = r.value("kind", std::string{"constant"});
      if (kind == "constant") {
        spec.rate.kind = RateSpec::Kind::kConstant;
        spec.rate.value = r.at("value").get<double>();
      } else if (kind == "linear") {
        spec.rate.kind = RateSpec::Kind::kLinear;
        spec.rate.from = r.at("from").get<double>();
        spec.rate.to = r.at("to").get<double>();
      } else if (kind == "piecewise") {
        spec.rate.kind = RateSpec::Kind::kPiecewise;
        for (const auto& seg : r.at("segments")) {
          const int idx = static_cast<int>(spec.start.months_until(month_from_json(seg.at("from"), "rate.segments.from")));
          spec.rate.segments.emplace_back(idx, seg.at("value").get<double>());
        }
        std::sort(spec.rate.segments.begin(), spec.rate.segments.end());
      } else {
        throw ValidationError("unknown rate kind '" + kind + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("scenario: ") + e.what());
  }
  spec.validate();
  return spec;
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

double sample_delay(const MixtureModel& model, double u) {
  if (u <= 0.0) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (model.cdf(hi) < u) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e8) return hi;
  }
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    if (model.cdf(mid) < u) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> lag_cdf(const MixtureParams& params, std::int64_t max_lag) {
  const MixtureModel model{params};
  std::vector<double> out(static_cast<std::size_t>(max_lag) + 1);
  for (std::int64_t d = 0; d <= max_lag; ++d) out[static_cast<std::size_t>(d)] = model.cdf(static_cast<double>(d + 1));
  return out;
}

double ks_distance(std::span<const double> f1, std::span<const double> f2) {
  if (f1.size() != f2.size()) throw ValidationError("KS distance needs CDFs on the same grid");
  double sup = 0.0;
  for (std::size_t i = 0; i < f1.size(); ++i) sup = std::max(sup, std::fabs(f1[i] - f2[i]));
  return sup;
}

EventSet GroundTruth::observe(Date cutoff) const {
  std::vector<EventRecord> visible;
  for (const auto& e : events) {
    if (e.occurred_on <= cutoff && e.reported_on <= cutoff) visible.push_back({e.entity_id, e.occurred_on, e.reported_on, false});
  }
  if (visible.empty()) throw DataError("no synthetic events observed by " + format_date(cutoff));
  return EventSet::from_records(std::move(visible));
}

std::vector<std::int64_t> GroundTruth::reported_counts(Date cutoff) const {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(spec.months), 0);
  for (const auto& e : events) {
    if (e.occurred_on <= cutoff && e.reported_on <= cutoff) ++counts[static_cast<std::size_t>(e.month_index)];
  }
  return counts;
}

std::pair<EventSet, GroundTruth> generate(const ScenarioSpec& spec) {
  spec.validate();
  GroundTruth truth;
  truth.spec = spec;
  truth.monthly_totals.assign(static_cast<std::size_t>(spec.months), 0);

  for (int i = 0; i < spec.months; ++i) {
    Random rng = Random::derived(spec.seed, static_cast<std::uint64_t>(i));
    const double rate = spec.rate.at(i, spec.months);
    const std::int64_t n = spec.poisson ? rng.poisson(rate) : std::llround(rate);
    const YearMonth month = spec.start.plus(i);
    const auto len = static_cast<std::int64_t>(month.length_days());
    const MixtureModel model{spec.truth_at(i)};
    truth.monthly_totals[static_cast<std::size_t>(i)] = n;
    for (std::int64_t k = 0; k < n; ++k) {
      SyntheticEvent e;
      char id[48];
      std::snprintf(id, sizeof id, "syn-%s-%06lld", month.str().c_str(), static_cast<long long>(k));
      e.entity_id = id;
      e.occurred_on = add_days(month.first_day(), rng.uniform_int(0, len - 1));
      e.delay = sample_delay(model, rng.uniform());
      e.reported_on = add_days(e.occurred_on, static_cast<std::int64_t>(std::floor(e.delay)));
      e.month_index = i;
      truth.events.push_back(std::move(e));
    }
  }
  EventSet observed = truth.observe(spec.effective_cutoff());
  std::sort(observed.records.begin(), observed.records.end(), [](const EventRecord& a, const EventRecord& b) {
    if (a.occurred_on != b.occurred_on) return a.occurred_on < b.occurred_on;
    if (a.reported_on != b.reported_on) return a.reported_on < b.reported_on;
    return a.entity_id < b.entity_id;
  });
  return {std::move(observed), std::move(truth)};
}

}  // namespace delaycorr
