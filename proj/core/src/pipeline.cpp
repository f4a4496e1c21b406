#include "delaycorr/pipeline.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "delaycorr/artifacts.hpp"
#include "delaycorr/csv.hpp"
#include "delaycorr/errors.hpp"
#include "delaycorr/synth.hpp"
#include "json.hpp"

namespace delaycorr {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kRedistributionStream = 0x5245444953545249ULL;

std::string tagged(const char* stage, const char* what) {
  if (what[0] == '[') return what;
  return std::string("[") + stage + "] " + what;
}

/// Runs `fn`, prefixing any error with the stage name while keeping its type.
template <typename Fn>
auto in_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ValidationError& e) {
    throw ValidationError(tagged(stage, e.what()));
  } catch (const DataError& e) {
    throw DataError(tagged(stage, e.what()));
  } catch (const FitError& e) {
    throw FitError(tagged(stage, e.what()));
  } catch (const json::exception& e) {
    throw DataError(tagged(stage, e.what()));
  } catch (const std::exception& e) {
    throw std::runtime_error(tagged(stage, e.what()));
  }
}

/// Calls fn(i) for i in [0, n) on up to `threads` workers. Rethrows the
/// error of the lowest failing index so failures are reported the same way
/// regardless of scheduling.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto count = static_cast<std::size_t>(std::max(1, threads));
  {
    std::vector<std::jthread> pool;
    for (std::size_t k = 1; k < std::min(count, n); ++k) pool.emplace_back(worker);
    worker();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

template <typename Fn>
std::string render(Fn&& fn) {
  std::ostringstream os;
  fn(os);
  return os.str();
}

std::string age_reference_name(AgeReference r) { return r == AgeReference::kMidMonth ? "mid-month" : "month-end"; }

class StageClock {
 public:
  template <typename Fn>
  auto time(const char* stage, Fn&& fn) -> decltype(fn()) {
    const auto t0 = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      record(stage, t0);
    } else {
      auto out = fn();
      record(stage, t0);
      return out;
    }
  }
  json to_json() const { return timings_; }

 private:
  void record(const char* stage, std::chrono::steady_clock::time_point t0) {
    timings_[stage] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  json timings_ = json::object();
};

// ---------------------------------------------------------------- stages --

EventSet ingest_stage(const PipelineConfig& cfg, ArtifactWriter& out, IngestStats& stats) {
  return in_stage("ingest", [&] {
    ParseResult parsed;
    if (cfg.scenario) {
      const auto generated = generate(load_scenario(*cfg.scenario));
      // Round-trip through the ingest format so synthetic mode matches a
      // run on the file written by `synth`.
      std::istringstream text{render([&](std::ostream& os) { write_events_csv(os, generated.first); })};
      parsed = parse_events(text, InputSchema{});
    } else {
      parsed = parse_event_files(cfg.inputs, cfg.schema);
    }
    stats.parsed = parsed.events.size();
    stats.rejected = parsed.rejects.size();
    stats.dropped_missing_occurrence = parsed.dropped_missing_occurrence;

    EventSet events = dedupe(parsed.events);
    stats.duplicates_removed = parsed.events.size() - events.size();
    if (cfg.redistribute_defaults) {
      RedistributionSummary summary;
      events = redistribute_default_dates(events, cfg.seed ^ kRedistributionStream, &summary);
      stats.redistributed = summary.total_moved;
      if (!cfg.include_redistributed) {
        const auto before = events.size();
        events = drop_redistributed(events);
        stats.excluded_redistributed = before - events.size();
      }
    }
    out.write("events.csv", render([&](std::ostream& os) { write_events_csv(os, events); }));
    out.write("rejects.csv", render([&](std::ostream& os) { write_rejects_csv(os, parsed.rejects); }));
    return events;
  });
}

struct DebiasProducts {
  std::vector<WindowResult> windows;
  std::int64_t delta_fix = 0;
};

DebiasProducts debias_stage(const EventSet& events, const PipelineConfig& cfg, ArtifactWriter& out,
                            bool dump_histograms, bool dump_distributions) {
  return in_stage("debias", [&] {
    const auto windows = enumerate_windows(events, cfg.windows);
    DebiasProducts products;
    products.windows.resize(windows.size());
    parallel_for(windows.size(), cfg.threads, [&](std::size_t i) {
      auto& r = products.windows[i];
      r.histograms = build_histograms(events, windows[i]);
      r.distribution = compute_delay_distribution(r.histograms);
      r.record.window = windows[i];
      r.record.age_max = r.histograms.age_max;
      r.record.delta_max = r.histograms.delta_max;
      r.record.degenerate = r.distribution.degenerate;
    });
    products.delta_fix = events.max_delay();

    std::vector<WindowRecord> records;
    for (const auto& r : products.windows) records.push_back(r.record);
    out.write("windows.csv", render([&](std::ostream& os) { write_windows_csv(os, records); }));
    const json dataset = {{"cutoff", format_date(events.cutoff)},
                          {"delta_fix", products.delta_fix},
                          {"n_events", events.size()}};
    out.write("dataset.json", dataset.dump(2) + "\n");
    for (const auto& r : products.windows) {
      const std::string id = r.record.window.id();
      if (dump_histograms) {
        out.write("histograms/" + id + ".csv",
                  render([&](std::ostream& os) { write_histograms_csv(os, r.histograms); }));
      }
      if (dump_distributions) {
        out.write("debiased/" + id + ".csv",
                  render([&](std::ostream& os) { write_distribution_csv(os, r.distribution); }));
      }
    }
    return products;
  });
}

std::vector<WindowFit> fit_stage(const std::vector<WindowResult>& windows, std::int64_t delta_fix,
                                 const PipelineConfig& cfg, ArtifactWriter& out) {
  return in_stage("fit", [&] {
    std::vector<WindowInput> inputs;
    inputs.reserve(windows.size());
    for (const auto& w : windows) inputs.push_back({w.record.window, w.distribution});

    std::map<std::string, std::vector<TraceRow>> traces;
    FitObservers observers;
    if (cfg.emit_traces) {
      observers.on_generation = [&](const Window& w, const TraceRow& row) { traces[w.id()].push_back(row); };
    }
    FitConfig fit_cfg = cfg.fit;
    fit_cfg.optimizer.seed = cfg.seed;
    auto fits = fit_all_windows(inputs, delta_fix, fit_cfg, observers);

    out.write("parameters.csv", render([&](std::ostream& os) { write_parameters_csv(os, fits); }));
    for (const auto& [id, rows] : traces) {
      out.write("traces/" + id + ".csv", render([&](std::ostream& os) { write_trace_csv(os, rows); }));
    }
    return fits;
  });
}

CorrectedSeries correct_stage(const EventSet& events, const std::vector<WindowFit>& fits, const PipelineConfig& cfg,
                              ArtifactWriter& out) {
  return in_stage("correct", [&] {
    auto series = correct_series(monthly_reported_counts(events), fits, events.cutoff, cfg.correction);
    out.write("corrected.csv", render([&](std::ostream& os) { write_corrected_csv(os, series); }));
    return series;
  });
}

// -------------------------------------------------------------- manifest --

json ingest_json(const IngestStats& s) {
  return {{"parsed", s.parsed},
          {"rejected", s.rejected},
          {"dropped_missing_occurrence", s.dropped_missing_occurrence},
          {"duplicates_removed", s.duplicates_removed},
          {"redistributed", s.redistributed},
          {"excluded_redistributed", s.excluded_redistributed}};
}

void write_manifest(const std::string& command, const PipelineConfig& cfg, const PipelineResult& result,
                    const StageClock& clock, ArtifactWriter& out) {
  json m;
  m["tool"] = "delaycorr";
  m["version"] = kVersion;
  m["command"] = command;
  m["config"] = json::parse(cfg.to_json());
  m["seed"] = cfg.seed;
  m["libraries"] = {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                  std::to_string(EIGEN_MINOR_VERSION)},
                    {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                          std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                          std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                    {"compiler", __VERSION__}};
  if (!result.events.empty()) {
    m["data"] = {{"cutoff", format_date(result.events.cutoff)}, {"n_events", result.events.size()}};
  }
  if (command == "run" || command == "ingest") m["ingest"] = ingest_json(result.ingest);
  if (result.delta_fix > 0) m["delta_fix"] = result.delta_fix;

  json windows = json::array();
  std::map<std::string, const WindowFit*> fit_by_id;
  for (const auto& f : result.fits) fit_by_id[f.window.id()] = &f;
  for (const auto& w : result.windows) {
    json entry = {{"window_end", w.record.window.id()},
                  {"n_events", w.record.window.n_events},
                  {"sparse", w.record.window.sparse},
                  {"degenerate", w.record.degenerate}};
    if (const auto it = fit_by_id.find(w.record.window.id()); it != fit_by_id.end()) {
      const WindowFit& f = *it->second;
      entry["fit_failed"] = f.failed;
      if (f.failed) {
        entry["message"] = f.message;
      } else {
        entry["converged"] = f.converged;
        entry["generations"] = f.generations;
        entry["evaluations"] = f.evaluations;
      }
    }
    windows.push_back(entry);
  }
  if (!windows.empty()) m["windows"] = windows;

  if (!result.series.rows.empty()) {
    json extrapolated = json::array();
    for (const auto& r : result.series.rows) {
      if (r.extrapolated) extrapolated.push_back(r.month.str());
    }
    m["correction"] = {{"months", result.series.rows.size()}, {"extrapolated_months", extrapolated}};
  }

  std::vector<std::string> artifacts = out.written();
  std::sort(artifacts.begin(), artifacts.end());
  m["artifacts"] = artifacts;

  const std::string prefix = command == "run" ? "" : command + ".";
  out.write(prefix + "manifest.json", m.dump(2) + "\n");
  // Timings vary run to run, so they live outside the manifest.
  out.write(prefix + "timings.json", clock.to_json().dump(2) + "\n");
}

// ------------------------------------------------------ upstream loading --

fs::path require_artifact(const PipelineConfig& cfg, const std::string& rel, const char* producer) {
  const fs::path p = cfg.output_dir / rel;
  if (!fs::exists(p)) {
    throw ValidationError("missing upstream artifact " + p.string() + "; produce it with `delaycorr " + producer + "`");
  }
  return p;
}

EventSet load_events(const PipelineConfig& cfg) {
  std::ifstream in(require_artifact(cfg, "events.csv", "ingest"));
  return parse_events(in, InputSchema{}).events;
}

template <typename Fn>
PipelineResult guarded(const PipelineConfig& cfg, Fn&& body) {
  cfg.validate();
  ArtifactWriter out{cfg.output_dir};
  try {
    fs::create_directories(cfg.output_dir);
    PipelineResult result = body(out);
    result.artifacts = out.written();
    return result;
  } catch (...) {
    out.rollback();
    throw;
  }
}

}  // namespace

// ---------------------------------------------------------------- config --

void PipelineConfig::apply_json(const std::string& text) {
  try {
    const json j = json::parse(text, nullptr, true, true);
    if (j.contains("inputs")) {
      inputs.clear();
      for (const auto& p : j["inputs"]) inputs.emplace_back(p.get<std::string>());
    }
    if (j.contains("scenario")) scenario = j["scenario"].get<std::string>();
    if (j.contains("output_dir")) output_dir = j["output_dir"].get<std::string>();
    if (j.contains("seed")) seed = j["seed"].get<std::uint64_t>();
    if (j.contains("threads")) threads = j["threads"].get<int>();
    if (j.contains("schema")) {
      const auto& s = j["schema"];
      schema.entity_column = s.value("entity_column", schema.entity_column);
      schema.occurred_column = s.value("occurred_column", schema.occurred_column);
      schema.reported_column = s.value("reported_column", schema.reported_column);
      if (s.contains("delimiter")) {
        const auto d = s["delimiter"].get<std::string>();
        if (d.size() != 1) throw ValidationError("schema.delimiter must be a single character");
        schema.delimiter = d[0];
      }
    }
    if (j.contains("ingest")) {
      const auto& s = j["ingest"];
      redistribute_defaults = s.value("redistribute_default_dates", redistribute_defaults);
      include_redistributed = s.value("include_redistributed", include_redistributed);
    }
    if (j.contains("windows")) {
      const auto& s = j["windows"];
      windows.length_months = s.value("length_months", windows.length_months);
      windows.step_months = s.value("step_months", windows.step_months);
      windows.min_events = s.value("min_events", windows.min_events);
      lag_resolution_days = s.value("lag_resolution_days", lag_resolution_days);
      for (const char* key : {"first_end", "last_end"}) {
        if (!s.contains(key)) continue;
        const auto m = YearMonth::parse(s[key].get<std::string>());
        if (!m) throw ValidationError(std::string("windows.") + key + " must be YYYY-MM");
        (std::string(key) == "first_end" ? windows.first_end : windows.last_end) = *m;
      }
    }
    if (j.contains("optimizer")) {
      const auto& s = j["optimizer"];
      auto& o = fit.optimizer;
      o.max_generations = s.value("max_generations", o.max_generations);
      o.initial_step = s.value("initial_step", o.initial_step);
      o.population = s.value("population", o.population);
      o.stagnation_generations = s.value("stagnation_generations", o.stagnation_generations);
      o.stagnation_tolerance = s.value("stagnation_tolerance", o.stagnation_tolerance);
      fit.fit_weight_scale = s.value("fit_weight", fit.fit_weight_scale);
      fit.coupling_weight_scale = s.value("coupling_weight", fit.coupling_weight_scale);
      if (s.contains("bounds")) {
        const auto& b = s["bounds"];
        auto& fb = fit.bounds;
        fb.alpha_min = b.value("alpha_min", fb.alpha_min);
        fb.alpha_max = b.value("alpha_max", fb.alpha_max);
        fb.scale_min = b.value("scale_min", fb.scale_min);
        fb.scale_max = b.value("scale_max", fb.scale_max);
        fb.mu_min_factor = b.value("mu_min_factor", fb.mu_min_factor);
        fb.mu_max_factor = b.value("mu_max_factor", fb.mu_max_factor);
        fb.sigma_min = b.value("sigma_min", fb.sigma_min);
        fb.sigma_max = b.value("sigma_max", fb.sigma_max);
      }
    }
    if (j.contains("correction")) {
      const auto& s = j["correction"];
      if (s.contains("age_reference")) {
        const auto ref = s["age_reference"].get<std::string>();
        if (ref == "mid-month") {
          correction.age_reference = AgeReference::kMidMonth;
        } else if (ref == "month-end") {
          correction.age_reference = AgeReference::kMonthEnd;
        } else {
          throw ValidationError("correction.age_reference must be mid-month or month-end");
        }
      }
      correction.year_days = s.value("year_days", correction.year_days);
    }
    if (j.contains("output")) {
      const auto& s = j["output"];
      emit_histograms = s.value("emit_histograms", emit_histograms);
      emit_distributions = s.value("emit_distributions", emit_distributions);
      emit_traces = s.value("emit_traces", emit_traces);
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
}

void PipelineConfig::load_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  apply_json(ss.str());
}

std::string PipelineConfig::to_json() const {
  json j;
  json in = json::array();
  for (const auto& p : inputs) in.push_back(p.string());
  j["inputs"] = in;
  if (scenario) j["scenario"] = scenario->string();
  j["seed"] = seed;
  j["threads"] = threads;
  j["schema"] = {{"entity_column", schema.entity_column},
                 {"occurred_column", schema.occurred_column},
                 {"reported_column", schema.reported_column},
                 {"delimiter", std::string(1, schema.delimiter)}};
  j["ingest"] = {{"redistribute_default_dates", redistribute_defaults},
                 {"include_redistributed", include_redistributed}};
  json w = {{"length_months", windows.length_months},
            {"step_months", windows.step_months},
            {"min_events", windows.min_events},
            {"lag_resolution_days", lag_resolution_days}};
  if (windows.first_end) w["first_end"] = windows.first_end->str();
  if (windows.last_end) w["last_end"] = windows.last_end->str();
  j["windows"] = w;
  const auto& o = fit.optimizer;
  const auto& b = fit.bounds;
  j["optimizer"] = {{"max_generations", o.max_generations},
                    {"initial_step", o.initial_step},
                    {"population", o.population},
                    {"stagnation_generations", o.stagnation_generations},
                    {"stagnation_tolerance", o.stagnation_tolerance},
                    {"fit_weight", fit.fit_weight_scale},
                    {"coupling_weight", fit.coupling_weight_scale},
                    {"bounds",
                     {{"alpha_min", b.alpha_min},
                      {"alpha_max", b.alpha_max},
                      {"scale_min", b.scale_min},
                      {"scale_max", b.scale_max},
                      {"mu_min_factor", b.mu_min_factor},
                      {"mu_max_factor", b.mu_max_factor},
                      {"sigma_min", b.sigma_min},
                      {"sigma_max", b.sigma_max}}}};
  j["correction"] = {{"age_reference", age_reference_name(correction.age_reference)},
                     {"year_days", correction.year_days}};
  j["output"] = {{"emit_histograms", emit_histograms},
                 {"emit_distributions", emit_distributions},
                 {"emit_traces", emit_traces}};
  return j.dump(2);
}

void PipelineConfig::validate() const {
  const auto fail = [](const std::string& msg) { throw ValidationError("config: " + msg); };
  if (threads < 1 || threads > 256) fail("threads must be in [1, 256]");
  if (lag_resolution_days != 1) fail("only 1-day lag resolution is supported");
  if (windows.length_months < 1) fail("windows.length_months must be >= 1");
  if (windows.step_months < 1) fail("windows.step_months must be >= 1");
  if (windows.min_events < 0) fail("windows.min_events must be >= 0");
  if (windows.first_end && windows.last_end && *windows.first_end > *windows.last_end) {
    fail("windows.first_end is after windows.last_end");
  }
  const auto& o = fit.optimizer;
  if (o.max_generations < 1) fail("optimizer.max_generations must be >= 1");
  if (!(o.initial_step > 0.0)) fail("optimizer.initial_step must be positive");
  if (o.population != 0 && o.population < 4) fail("optimizer.population must be 0 (default) or >= 4");
  if (o.stagnation_generations < 0) fail("optimizer.stagnation_generations must be >= 0");
  const auto& b = fit.bounds;
  if (!(b.alpha_min > 0.0 && b.alpha_min < b.alpha_max && b.alpha_max < 1.0)) fail("alpha bounds must satisfy 0 < min < max < 1");
  if (!(b.scale_min > 0.0 && b.scale_min < b.scale_max)) fail("scale bounds must satisfy 0 < min < max");
  if (!(b.sigma_min > 0.0 && b.sigma_min < b.sigma_max)) fail("sigma bounds must satisfy 0 < min < max");
  if (!(b.mu_min_factor < b.mu_max_factor)) fail("mu bound factors must satisfy min < max");
  if (!(fit.fit_weight_scale >= 0.0 && fit.coupling_weight_scale >= 0.0)) fail("term weights must be non-negative");
  if (!(correction.year_days > 0.0)) fail("correction.year_days must be positive");
  for (const auto& p : inputs) {
    if (!fs::exists(p)) fail("input file not found: " + p.string());
  }
  if (scenario && !fs::exists(*scenario)) fail("scenario file not found: " + scenario->string());
}

// -------------------------------------------------------------- commands --

PipelineResult run_pipeline(const PipelineConfig& config) {
  if (config.inputs.empty() && !config.scenario) throw ValidationError("config: no inputs and no scenario given");
  return guarded(config, [&](ArtifactWriter& out) {
    PipelineResult r;
    StageClock clock;
    r.events = clock.time("ingest", [&] { return ingest_stage(config, out, r.ingest); });
    auto products = clock.time("debias", [&] {
      return debias_stage(r.events, config, out, config.emit_histograms, config.emit_distributions);
    });
    r.windows = std::move(products.windows);
    r.delta_fix = products.delta_fix;
    r.fits = clock.time("fit", [&] { return fit_stage(r.windows, r.delta_fix, config, out); });
    r.series = clock.time("correct", [&] { return correct_stage(r.events, r.fits, config, out); });
    write_manifest("run", config, r, clock, out);
    return r;
  });
}

PipelineResult run_ingest_command(const PipelineConfig& config) {
  if (config.inputs.empty() && !config.scenario) throw ValidationError("config: no inputs and no scenario given");
  return guarded(config, [&](ArtifactWriter& out) {
    PipelineResult r;
    StageClock clock;
    r.events = clock.time("ingest", [&] { return ingest_stage(config, out, r.ingest); });
    write_manifest("ingest", config, r, clock, out);
    return r;
  });
}

PipelineResult run_debias_command(const PipelineConfig& config) {
  return guarded(config, [&](ArtifactWriter& out) {
    PipelineResult r;
    StageClock clock;
    r.events = in_stage("debias", [&] { return load_events(config); });
    auto products = clock.time("debias", [&] { return debias_stage(r.events, config, out, true, true); });
    r.windows = std::move(products.windows);
    r.delta_fix = products.delta_fix;
    write_manifest("debias", config, r, clock, out);
    return r;
  });
}

PipelineResult run_fit_command(const PipelineConfig& config) {
  return guarded(config, [&](ArtifactWriter& out) {
    PipelineResult r;
    StageClock clock;
    in_stage("fit", [&] {
      std::ifstream wf(require_artifact(config, "windows.csv", "debias"));
      const auto records = read_windows_csv(wf, "windows.csv");
      std::ifstream df(require_artifact(config, "dataset.json", "debias"));
      r.delta_fix = json::parse(df).at("delta_fix").get<std::int64_t>();
      for (const auto& rec : records) {
        const std::string rel = "debiased/" + rec.window.id() + ".csv";
        std::ifstream in(require_artifact(config, rel, "debias"));
        WindowResult w;
        w.record = rec;
        w.distribution = read_distribution_csv(in, rel);
        r.windows.push_back(std::move(w));
      }
    });
    r.fits = clock.time("fit", [&] { return fit_stage(r.windows, r.delta_fix, config, out); });
    write_manifest("fit", config, r, clock, out);
    return r;
  });
}

PipelineResult run_correct_command(const PipelineConfig& config) {
  return guarded(config, [&](ArtifactWriter& out) {
    PipelineResult r;
    StageClock clock;
    in_stage("correct", [&] {
      r.events = load_events(config);
      std::ifstream pf(require_artifact(config, "parameters.csv", "fit"));
      r.fits = read_parameters_csv(pf, "parameters.csv");
    });
    r.series = clock.time("correct", [&] { return correct_stage(r.events, r.fits, config, out); });
    write_manifest("correct", config, r, clock, out);
    return r;
  });
}

DebiasedDistribution debias_histogram_file(const fs::path& histogram, const fs::path& output) {
  return in_stage("debias", [&] {
    std::ifstream in(histogram);
    if (!in) throw ValidationError("cannot open histogram file " + histogram.string());
    const auto h = read_histograms_csv(in, histogram.filename().string());
    auto dist = compute_delay_distribution(h);
    csv::write_file_atomic(output, render([&](std::ostream& os) { write_distribution_csv(os, dist); }));
    return dist;
  });
}

EventSet run_synth_command(const fs::path& scenario, const fs::path& events_out,
                           const std::optional<fs::path>& truth_out) {
  return in_stage("synth", [&] {
    auto [events, truth] = generate(load_scenario(scenario));
    csv::write_file_atomic(events_out, render([&](std::ostream& os) { write_events_csv(os, events); }));
    if (truth_out) {
      const auto reported = truth.reported_counts(truth.spec.effective_cutoff());
      csv::write_file_atomic(*truth_out, render([&](std::ostream& os) {
                               os << "month,true_count,reported_count\n";
                               for (int i = 0; i < truth.spec.months; ++i) {
                                 const auto k = static_cast<std::size_t>(i);
                                 os << truth.spec.start.plus(i).str() << ',' << truth.monthly_totals[k] << ','
                                    << reported[k] << '\n';
                               }
                             }));
    }
    return events;
  });
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ValidationError*>(&e)) return 2;
  if (dynamic_cast<const DataError*>(&e)) return 3;
  if (dynamic_cast<const FitError*>(&e)) return 4;
  return 1;
}

}  // namespace delaycorr
