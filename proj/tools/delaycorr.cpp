// delaycorr: reporting-delay correction for monthly event counts.
//
//   delaycorr ingest  --input a.csv [--input b.csv] --out DIR
//   delaycorr debias  --out DIR                 (reads DIR/events.csv)
//   delaycorr debias  --histogram H.csv --distribution-out F.csv
//   delaycorr fit     --out DIR [--trace]
//   delaycorr correct --out DIR
//   delaycorr synth   --scenario S.json --events-out E.csv [--truth-out T.csv]
//   delaycorr run     (--input ... | --scenario S.json) --out DIR
//
// Flags override --config, which overrides built-in defaults.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "delaycorr/errors.hpp"
#include "delaycorr/pipeline.hpp"

namespace {

using delaycorr::PipelineConfig;

struct Flags {
  std::string config;
  std::vector<std::string> inputs;
  std::string scenario;
  std::string out;
  std::uint64_t seed = 0;
  int threads = 0;
  int window_length = 0;
  int window_step = 0;
  std::string first_end;
  std::string last_end;
  std::int64_t min_events = 0;
  int max_generations = 0;
  std::string age_reference;
  double year_days = 0.0;
  bool no_redistribute = false;
  bool exclude_redistributed = false;
  bool histograms = false;
  bool distributions = false;
  bool trace = false;
};

struct Options {
  CLI::Option* config = nullptr;
  CLI::Option* inputs = nullptr;
  CLI::Option* scenario = nullptr;
  CLI::Option* out = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* threads = nullptr;
  CLI::Option* window_length = nullptr;
  CLI::Option* window_step = nullptr;
  CLI::Option* first_end = nullptr;
  CLI::Option* last_end = nullptr;
  CLI::Option* min_events = nullptr;
  CLI::Option* max_generations = nullptr;
  CLI::Option* age_reference = nullptr;
  CLI::Option* year_days = nullptr;
};

// Each subcommand gets its own copy of the shared flags so `count()` tells
// which ones were given on that command line.
Options add_common(CLI::App* app, Flags& f, bool with_inputs) {
  Options o;
  o.config = app->add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
  if (with_inputs) {
    o.inputs = app->add_option("-i,--input", f.inputs, "event CSV file (repeatable)");
    o.scenario = app->add_option("--scenario", f.scenario, "generate input from a synthetic scenario");
  }
  o.out = app->add_option("-o,--out", f.out, "output directory");
  o.seed = app->add_option("--seed", f.seed, "random seed");
  o.threads = app->add_option("--threads", f.threads, "worker thread cap");
  o.window_length = app->add_option("--window-length", f.window_length, "window length in months");
  o.window_step = app->add_option("--window-step", f.window_step, "months between window ends");
  o.first_end = app->add_option("--first-end", f.first_end, "first window end month (YYYY-MM)");
  o.last_end = app->add_option("--last-end", f.last_end, "last window end month (YYYY-MM)");
  o.min_events = app->add_option("--min-events", f.min_events, "windows below this count are flagged sparse");
  o.max_generations = app->add_option("--max-generations", f.max_generations, "optimizer generation cap");
  o.age_reference = app->add_option("--age-reference", f.age_reference, "mid-month or month-end")
                        ->check(CLI::IsMember({"mid-month", "month-end"}));
  o.year_days = app->add_option("--year-days", f.year_days, "year length used for year-ahead correction");
  app->add_flag("--no-redistribute", f.no_redistribute, "keep January 1 default dates as reported");
  app->add_flag("--exclude-redistributed", f.exclude_redistributed, "drop records moved off January 1");
  app->add_flag("--histograms", f.histograms, "write per-window histograms");
  app->add_flag("--distributions", f.distributions, "write per-window debiased distributions");
  app->add_flag("--trace", f.trace, "write per-generation optimizer traces");
  return o;
}

delaycorr::YearMonth month_flag(const std::string& text, const char* name) {
  const auto m = delaycorr::YearMonth::parse(text);
  if (!m) throw delaycorr::ValidationError(std::string(name) + " must be YYYY-MM, got '" + text + "'");
  return *m;
}

PipelineConfig build_config(const Flags& f, const Options& o) {
  PipelineConfig cfg;
  if (o.config->count()) cfg.load_file(f.config);
  if (o.inputs && o.inputs->count()) cfg.inputs.assign(f.inputs.begin(), f.inputs.end());
  if (o.scenario && o.scenario->count()) cfg.scenario = f.scenario;
  if (o.out->count()) cfg.output_dir = f.out;
  if (o.seed->count()) cfg.seed = f.seed;
  if (o.threads->count()) cfg.threads = f.threads;
  if (o.window_length->count()) cfg.windows.length_months = f.window_length;
  if (o.window_step->count()) cfg.windows.step_months = f.window_step;
  if (o.first_end->count()) cfg.windows.first_end = month_flag(f.first_end, "--first-end");
  if (o.last_end->count()) cfg.windows.last_end = month_flag(f.last_end, "--last-end");
  if (o.min_events->count()) cfg.windows.min_events = f.min_events;
  if (o.max_generations->count()) cfg.fit.optimizer.max_generations = f.max_generations;
  if (o.age_reference->count()) {
    cfg.correction.age_reference =
        f.age_reference == "mid-month" ? delaycorr::AgeReference::kMidMonth : delaycorr::AgeReference::kMonthEnd;
  }
  if (o.year_days->count()) cfg.correction.year_days = f.year_days;
  if (f.no_redistribute) cfg.redistribute_defaults = false;
  if (f.exclude_redistributed) cfg.include_redistributed = false;
  if (f.histograms) cfg.emit_histograms = true;
  if (f.distributions) cfg.emit_distributions = true;
  if (f.trace) cfg.emit_traces = true;
  return cfg;
}

void summarize(const delaycorr::PipelineResult& r, const PipelineConfig& cfg) {
  std::cerr << "wrote " << r.artifacts.size() << " files to " << cfg.output_dir.string() << '\n';
  std::size_t failed = 0;
  for (const auto& f : r.fits) failed += f.failed ? 1 : 0;
  if (failed > 0) std::cerr << "warning: " << failed << " window fit(s) failed; see manifest\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reporting-delay correction for monthly event counts", "delaycorr"};
  app.set_version_flag("--version", delaycorr::kVersion);
  app.require_subcommand(1);

  Flags run_f, ingest_f, debias_f, fit_f, correct_f;
  auto* run = app.add_subcommand("run", "ingest, debias, fit and correct in one go");
  auto* ingest = app.add_subcommand("ingest", "parse, dedupe and redistribute event records");
  auto* debias = app.add_subcommand("debias", "per-window histograms and debiased delay distributions");
  auto* fit = app.add_subcommand("fit", "fit the delay mixture per window");
  auto* correct = app.add_subcommand("correct", "corrected and year-ahead monthly counts");
  auto* synth = app.add_subcommand("synth", "generate a synthetic event file");

  const Options run_o = add_common(run, run_f, true);
  const Options ingest_o = add_common(ingest, ingest_f, true);
  const Options debias_o = add_common(debias, debias_f, false);
  const Options fit_o = add_common(fit, fit_f, false);
  const Options correct_o = add_common(correct, correct_f, false);

  std::string histogram_in, distribution_out;
  auto* hist_opt = debias->add_option("--histogram", histogram_in, "debias a single histogram CSV")
                       ->check(CLI::ExistingFile);
  debias->add_option("--distribution-out", distribution_out, "where to write the distribution for --histogram")
      ->needs(hist_opt);

  std::string synth_scenario, synth_events, synth_truth;
  synth->add_option("--scenario", synth_scenario, "scenario JSON")->required()->check(CLI::ExistingFile);
  synth->add_option("--events-out", synth_events, "event CSV to write")->required();
  synth->add_option("--truth-out", synth_truth, "monthly true and reported counts CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*synth) {
      std::optional<std::filesystem::path> truth;
      if (!synth_truth.empty()) truth = synth_truth;
      const auto events = delaycorr::run_synth_command(synth_scenario, synth_events, truth);
      std::cerr << "wrote " << events.size() << " events to " << synth_events << '\n';
      return 0;
    }
    if (*debias && !histogram_in.empty()) {
      if (distribution_out.empty()) throw delaycorr::ValidationError("--histogram requires --distribution-out");
      const auto dist = delaycorr::debias_histogram_file(histogram_in, distribution_out);
      if (dist.degenerate) std::cerr << "warning: distribution is degenerate\n";
      return 0;
    }
    if (*run) {
      const auto cfg = build_config(run_f, run_o);
      summarize(delaycorr::run_pipeline(cfg), cfg);
    } else if (*ingest) {
      const auto cfg = build_config(ingest_f, ingest_o);
      summarize(delaycorr::run_ingest_command(cfg), cfg);
    } else if (*debias) {
      const auto cfg = build_config(debias_f, debias_o);
      summarize(delaycorr::run_debias_command(cfg), cfg);
    } else if (*fit) {
      const auto cfg = build_config(fit_f, fit_o);
      summarize(delaycorr::run_fit_command(cfg), cfg);
    } else if (*correct) {
      const auto cfg = build_config(correct_f, correct_o);
      summarize(delaycorr::run_correct_command(cfg), cfg);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return delaycorr::exit_code_for(e);
  }
  return 0;
}
