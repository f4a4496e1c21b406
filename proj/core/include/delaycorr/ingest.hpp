#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "delaycorr/date.hpp"

namespace delaycorr {

/// One incident as it appears in the merged event feed.
struct EventRecord {
  std::string entity_id;
  Date occurred_on;
  Date reported_on;
  /// Set when the occurrence date was moved off a January-1 default.
  bool redistributed = false;

  std::int64_t delay_days() const { return days_between(occurred_on, reported_on); }

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

/// Ordered set of incidents observed as of `cutoff` (the latest report date).
struct EventSet {
  std::vector<EventRecord> records;
  Date cutoff{};

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }

  /// Builds a set and computes its cutoff. Throws DataError when empty.
  static EventSet from_records(std::vector<EventRecord> records);

  /// Largest reporting delay in the set (delta_fix).
  std::int64_t max_delay() const;
};

/// Column mapping for delimited input.
struct InputSchema {
  std::string entity_column = "entity_id";
  std::string occurred_column = "occurred_on";
  std::string reported_column = "reported_on";
  char delimiter = ',';
};

enum class RejectReason {
  kWrongFieldCount,
  kMissingEntity,
  kMissingReportDate,
  kMalformedDate,
  kInconsistentDates,
};

const char* reject_code(RejectReason r);

struct RejectedRow {
  std::size_t line = 0;  // 1-based, header is line 1
  RejectReason reason{};
  std::string detail;
};

struct ParseResult {
  EventSet events;
  std::vector<RejectedRow> rejects;
  /// Rows without an occurrence date. These are excluded, not rejected.
  std::size_t dropped_missing_occurrence = 0;
};

/// Parses a delimited event stream. Throws DataError when the header lacks a
/// mapped column or no valid rows remain.
ParseResult parse_events(std::istream& in, const InputSchema& schema = {});

/// Parses and concatenates several files; rejects carry their source file
/// in `detail`.
ParseResult parse_event_files(const std::vector<std::filesystem::path>& paths,
                              const InputSchema& schema = {});

/// Collapses records of one entity whose occurrence dates lie within seven
/// days of each other. The survivor is the earliest occurrence, ties broken
/// by earliest report. Output is sorted by (occurred_on, reported_on,
/// entity_id).
EventSet dedupe(const EventSet& events);

struct RedistributionSummary {
  struct Year {
    int year = 0;
    std::int64_t jan1_count = 0;
    double baseline = 0.0;
    std::int64_t moved = 0;
    bool uniform_fallback = false;
  };
  std::vector<Year> years;
  std::int64_t total_moved = 0;
};

/// Moves the excess of January-1 occurrences above the year's median daily
/// count onto other days of the same year. Target days are drawn with
/// probability proportional to their existing occurrence counts, restricted
/// to days no later than each record's report date.
EventSet redistribute_default_dates(const EventSet& events, std::uint64_t seed,
                                    RedistributionSummary* summary = nullptr);

/// Removes records flagged as redistributed.
EventSet drop_redistributed(const EventSet& events);

void write_events_csv(std::ostream& out, const EventSet& events);
void write_rejects_csv(std::ostream& out, const std::vector<RejectedRow>& rejects);

}  // namespace delaycorr
