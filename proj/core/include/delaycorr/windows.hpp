#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "delaycorr/date.hpp"
#include "delaycorr/ingest.hpp"

namespace delaycorr {

/// A block of consecutive occurrence months, identified by its final month.
struct Window {
  YearMonth end_month;
  Date start{};
  /// Last day of `end_month`, clamped to the data cutoff.
  Date end{};
  std::int64_t n_events = 0;
  /// Fewer than the configured minimum number of events.
  bool sparse = false;

  std::string id() const { return end_month.str(); }
};

struct WindowSpec {
  int length_months = 24;
  int step_months = 1;
  /// Defaults: first_end is the first month whose window starts at or after
  /// the earliest occurrence month; last_end is the cutoff month.
  std::optional<YearMonth> first_end;
  std::optional<YearMonth> last_end;
  std::int64_t min_events = 100;
};

/// Whole days from the occurrence date to the cutoff. Throws DataError when
/// the event occurs after the cutoff.
std::int64_t compute_age(const EventRecord& record, Date cutoff);

/// One window per step from first_end to last_end inclusive. Throws
/// ValidationError for an inverted range or a last_end past the cutoff month.
std::vector<Window> enumerate_windows(const EventSet& events, const WindowSpec& spec);

/// Age and delay histograms of one window at 1-day resolution. Both vectors
/// have age_max + 1 entries.
struct DelayHistograms {
  std::vector<std::int64_t> age;
  std::vector<std::int64_t> delay;
  std::int64_t age_max = 0;
  std::int64_t delta_max = 0;
  std::int64_t n_events = 0;

  std::int64_t h_age(std::int64_t a) const {
    return a >= 0 && a < static_cast<std::int64_t>(age.size()) ? age[static_cast<std::size_t>(a)] : 0;
  }
  std::int64_t h_delay(std::int64_t d) const {
    return d >= 0 && d < static_cast<std::int64_t>(delay.size()) ? delay[static_cast<std::size_t>(d)] : 0;
  }

  /// Builds histograms from explicit (age, delay) pairs; each delay must not
  /// exceed its age.
  static DelayHistograms from_pairs(const std::vector<std::pair<std::int64_t, std::int64_t>>& age_delay);
};

/// Histograms of all events occurring inside the window, whenever they were
/// reported. Ages are measured against `events.cutoff`. Throws DataError for
/// an empty selection.
DelayHistograms build_histograms(const EventSet& events, const Window& window);

/// `lag,h_A,h_delta`, one row per lag with a non-zero count.
void write_histograms_csv(std::ostream& out, const DelayHistograms& h);
DelayHistograms read_histograms_csv(std::istream& in, const std::string& source);

}  // namespace delaycorr
