#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "delaycorr/correct.hpp"
#include "delaycorr/debias.hpp"
#include "delaycorr/fit.hpp"
#include "delaycorr/ingest.hpp"
#include "delaycorr/artifacts.hpp"
#include "delaycorr/windows.hpp"

namespace delaycorr {

inline constexpr const char* kVersion = "0.1.0";

struct PipelineConfig {
  std::vector<std::filesystem::path> inputs;
  /// Synthetic mode: generate the input from this scenario file instead.
  std::optional<std::filesystem::path> scenario;
  std::filesystem::path output_dir = "delaycorr-out";
  InputSchema schema;
  bool redistribute_defaults = true;
  bool include_redistributed = true;
  std::uint64_t seed = 1;
  WindowSpec windows;
  int lag_resolution_days = 1;
  FitConfig fit;
  CorrectionConfig correction;
  bool emit_histograms = false;
  bool emit_distributions = false;
  bool emit_traces = false;
  int threads = 1;

  /// Overlays the fields present in a JSON config document.
  void apply_json(const std::string& text);
  void load_file(const std::filesystem::path& path);
  /// Effective configuration as pretty JSON. The output directory is left
  /// out so that runs into different directories echo identically.
  std::string to_json() const;
  /// Range checks. Throws ValidationError.
  void validate() const;
};

struct IngestStats {
  std::size_t parsed = 0;
  std::size_t rejected = 0;
  std::size_t dropped_missing_occurrence = 0;
  std::size_t duplicates_removed = 0;
  std::int64_t redistributed = 0;
  std::size_t excluded_redistributed = 0;
};

struct WindowResult {
  WindowRecord record;
  DelayHistograms histograms;
  DebiasedDistribution distribution;
};

/// In-memory products of a pipeline invocation.
struct PipelineResult {
  EventSet events;
  IngestStats ingest;
  std::int64_t delta_fix = 0;
  std::vector<WindowResult> windows;
  std::vector<WindowFit> fits;
  CorrectedSeries series;
  /// Relative paths of the files written, in write order.
  std::vector<std::string> artifacts;
};

/// ingest -> windows/debias -> fit -> correct, writing every artifact and a
/// manifest. On failure, files written by this call are removed and the
/// exception is rethrown with a "[stage]" prefix.
PipelineResult run_pipeline(const PipelineConfig& config);

// Single-stage commands. Each reads its upstream artifacts from
// config.output_dir and writes its own artifacts there.
PipelineResult run_ingest_command(const PipelineConfig& config);
PipelineResult run_debias_command(const PipelineConfig& config);
PipelineResult run_fit_command(const PipelineConfig& config);
PipelineResult run_correct_command(const PipelineConfig& config);

/// Debiases one histogram CSV (`lag,h_A,h_delta`) into a distribution CSV.
DebiasedDistribution debias_histogram_file(const std::filesystem::path& histogram,
                                           const std::filesystem::path& output);

/// Generates a scenario and writes its observed events in ingest format,
/// plus optional monthly truth (`month,true_count,reported_count`).
EventSet run_synth_command(const std::filesystem::path& scenario, const std::filesystem::path& events_out,
                           const std::optional<std::filesystem::path>& truth_out);

/// 2 validation, 3 data, 4 fit failure, 1 anything else.
int exit_code_for(const std::exception& e);

}  // namespace delaycorr
