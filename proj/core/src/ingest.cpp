#include "delaycorr/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>

#include "delaycorr/csv.hpp"
#include "delaycorr/errors.hpp"
#include "delaycorr/random.hpp"

namespace delaycorr {

namespace {

bool canonical_less(const EventRecord& a, const EventRecord& b) {
  if (a.occurred_on != b.occurred_on) return a.occurred_on < b.occurred_on;
  if (a.reported_on != b.reported_on) return a.reported_on < b.reported_on;
  return a.entity_id < b.entity_id;
}

double median_of(std::vector<std::int64_t> values) {
  if (values.empty()) return 0.0;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = static_cast<double>(values[mid]);
  if (values.size() % 2 == 1) return upper;
  const auto lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (upper + static_cast<double>(lower));
}

}  // namespace

EventSet EventSet::from_records(std::vector<EventRecord> records) {
  if (records.empty()) throw DataError("event set is empty");
  EventSet set;
  set.cutoff = records.front().reported_on;
  for (const auto& r : records) set.cutoff = std::max(set.cutoff, r.reported_on);
  set.records = std::move(records);
  return set;
}

std::int64_t EventSet::max_delay() const {
  std::int64_t m = 0;
  for (const auto& r : records) m = std::max(m, r.delay_days());
  return m;
}

const char* reject_code(RejectReason r) {
  switch (r) {
    case RejectReason::kWrongFieldCount: return "WRONG_FIELD_COUNT";
    case RejectReason::kMissingEntity: return "MISSING_ENTITY";
    case RejectReason::kMissingReportDate: return "MISSING_REPORT_DATE";
    case RejectReason::kMalformedDate: return "MALFORMED_DATE";
    case RejectReason::kInconsistentDates: return "INCONSISTENT_DATES";
  }
  return "UNKNOWN";
}

namespace {

void parse_into(std::istream& in, const InputSchema& schema, const std::string& source,
                std::vector<EventRecord>& records, ParseResult& result) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
      header = csv::split_line(line, schema.delimiter);
      break;
    }
  }
  if (header.empty()) throw DataError(source + ": missing header row");
  const auto find_col = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw DataError(source + ": header lacks column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t ce = find_col(schema.entity_column);
  const std::size_t co = find_col(schema.occurred_column);
  const std::size_t cr = find_col(schema.reported_column);

  const auto reject = [&](RejectReason why, std::string detail) {
    if (!source.empty()) detail = source + ": " + detail;
    result.rejects.push_back({line_no, why, std::move(detail)});
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = csv::split_line(line, schema.delimiter);
    if (fields.size() != header.size()) {
      reject(RejectReason::kWrongFieldCount, "expected " + std::to_string(header.size()) +
                                                 " fields, got " + std::to_string(fields.size()));
      continue;
    }
    const std::string& entity = fields[ce];
    const std::string& occurred = fields[co];
    const std::string& reported = fields[cr];
    if (entity.empty()) {
      reject(RejectReason::kMissingEntity, "empty entity key");
      continue;
    }
    if (occurred.empty()) {
      ++result.dropped_missing_occurrence;
      continue;
    }
    if (reported.empty()) {
      reject(RejectReason::kMissingReportDate, "empty report date");
      continue;
    }
    const auto occ = parse_date(occurred);
    if (!occ) {
      reject(RejectReason::kMalformedDate, "bad occurrence date '" + occurred + "'");
      continue;
    }
    const auto rep = parse_date(reported);
    if (!rep) {
      reject(RejectReason::kMalformedDate, "bad report date '" + reported + "'");
      continue;
    }
    if (*rep < *occ) {
      reject(RejectReason::kInconsistentDates, "reported " + reported + " before occurred " + occurred);
      continue;
    }
    records.push_back({entity, *occ, *rep, false});
  }
}

}  // namespace

ParseResult parse_events(std::istream& in, const InputSchema& schema) {
  ParseResult result;
  std::vector<EventRecord> records;
  parse_into(in, schema, "", records, result);
  if (records.empty()) throw DataError("no valid event rows in input");
  result.events = EventSet::from_records(std::move(records));
  return result;
}

ParseResult parse_event_files(const std::vector<std::filesystem::path>& paths,
                              const InputSchema& schema) {
  ParseResult result;
  std::vector<EventRecord> records;
  for (const auto& p : paths) {
    std::ifstream in(p);
    if (!in) throw DataError("cannot open input " + p.string());
    parse_into(in, schema, p.filename().string(), records, result);
  }
  if (records.empty()) throw DataError("no valid event rows in input");
  result.events = EventSet::from_records(std::move(records));
  return result;
}

EventSet dedupe(const EventSet& events) {
  std::vector<EventRecord> sorted = events.records;
  std::sort(sorted.begin(), sorted.end(), [](const EventRecord& a, const EventRecord& b) {
    if (a.entity_id != b.entity_id) return a.entity_id < b.entity_id;
    if (a.occurred_on != b.occurred_on) return a.occurred_on < b.occurred_on;
    return a.reported_on < b.reported_on;
  });
  std::vector<EventRecord> kept;
  kept.reserve(sorted.size());
  for (auto& r : sorted) {
    if (!kept.empty() && kept.back().entity_id == r.entity_id &&
        days_between(kept.back().occurred_on, r.occurred_on) <= 7) {
      continue;
    }
    kept.push_back(std::move(r));
  }
  std::sort(kept.begin(), kept.end(), canonical_less);
  return EventSet::from_records(std::move(kept));
}

EventSet redistribute_default_dates(const EventSet& events, std::uint64_t seed,
                                    RedistributionSummary* summary) {
  std::vector<EventRecord> records = events.records;
  std::map<int, std::vector<std::size_t>> by_year;
  for (std::size_t i = 0; i < records.size(); ++i) {
    by_year[YearMonth::of(records[i].occurred_on).year()].push_back(i);
  }

  RedistributionSummary local;
  for (const auto& [year, members] : by_year) {
    const Date jan1 = YearMonth{year, 1}.first_day();
    const auto year_len = static_cast<std::size_t>(days_between(jan1, YearMonth{year, 12}.last_day()) + 1);

    std::vector<std::int64_t> daily(year_len, 0);
    std::vector<std::size_t> jan1_records;
    for (std::size_t i : members) {
      const auto doy = static_cast<std::size_t>(days_between(jan1, records[i].occurred_on));
      ++daily[doy];
      if (doy == 0) jan1_records.push_back(i);
    }

    RedistributionSummary::Year info;
    info.year = year;
    info.jan1_count = daily[0];
    info.baseline = median_of(std::vector<std::int64_t>(daily.begin() + 1, daily.end()));
    const auto keep = std::min<std::int64_t>(daily[0], std::llround(info.baseline));
    const std::int64_t excess = daily[0] - keep;
    if (excess <= 0) {
      local.years.push_back(info);
      continue;
    }

    // prefix[d] = total weight of days 1..d
    std::vector<std::int64_t> prefix(year_len, 0);
    for (std::size_t d = 1; d < year_len; ++d) prefix[d] = prefix[d - 1] + daily[d];

    Random rng = Random::derived(seed, static_cast<std::uint64_t>(year));
    // Partial Fisher-Yates picks which default-dated records move.
    for (std::int64_t k = 0; k < excess; ++k) {
      const auto j = static_cast<std::size_t>(
          rng.uniform_int(k, static_cast<std::int64_t>(jan1_records.size()) - 1));
      std::swap(jan1_records[static_cast<std::size_t>(k)], jan1_records[j]);
    }
    for (std::int64_t k = 0; k < excess; ++k) {
      EventRecord& r = records[jan1_records[static_cast<std::size_t>(k)]];
      const auto limit = static_cast<std::size_t>(
          std::min<std::int64_t>(static_cast<std::int64_t>(year_len) - 1, days_between(jan1, r.reported_on)));
      if (limit == 0) continue;  // reported on Jan 1 itself: nowhere to go
      std::size_t target;
      if (prefix[limit] == 0) {
        info.uniform_fallback = true;
        target = static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(limit)));
      } else {
        const auto pick = rng.uniform_int(0, prefix[limit] - 1);
        target = static_cast<std::size_t>(
            std::upper_bound(prefix.begin() + 1, prefix.begin() + static_cast<std::ptrdiff_t>(limit) + 1, pick) -
            prefix.begin());
      }
      r.occurred_on = add_days(jan1, static_cast<std::int64_t>(target));
      r.redistributed = true;
      ++info.moved;
    }
    local.total_moved += info.moved;
    local.years.push_back(info);
  }

  std::stable_sort(records.begin(), records.end(), canonical_less);
  if (summary) *summary = std::move(local);
  return EventSet::from_records(std::move(records));
}

EventSet drop_redistributed(const EventSet& events) {
  std::vector<EventRecord> kept;
  kept.reserve(events.size());
  for (const auto& r : events.records) {
    if (!r.redistributed) kept.push_back(r);
  }
  return EventSet::from_records(std::move(kept));
}

void write_events_csv(std::ostream& out, const EventSet& events) {
  out << "entity_id,occurred_on,reported_on\n";
  for (const auto& r : events.records) {
    out << csv::escape_field(r.entity_id) << ',' << format_date(r.occurred_on) << ','
        << format_date(r.reported_on) << '\n';
  }
}

void write_rejects_csv(std::ostream& out, const std::vector<RejectedRow>& rejects) {
  out << "line,reason,detail\n";
  for (const auto& r : rejects) {
    out << r.line << ',' << reject_code(r.reason) << ',' << csv::escape_field(r.detail) << '\n';
  }
}

}  // namespace delaycorr
