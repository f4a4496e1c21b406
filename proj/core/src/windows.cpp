#include "delaycorr/windows.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <ostream>

#include "delaycorr/csv.hpp"
#include "delaycorr/errors.hpp"
#include "delaycorr/numeric_format.hpp"

namespace delaycorr {

std::int64_t compute_age(const EventRecord& record, Date cutoff) {
  const auto age = days_between(record.occurred_on, cutoff);
  if (age < 0) {
    throw DataError("event of " + record.entity_id + " occurs on " + format_date(record.occurred_on) +
                    ", after cutoff " + format_date(cutoff));
  }
  return age;
}

std::vector<Window> enumerate_windows(const EventSet& events, const WindowSpec& spec) {
  if (spec.length_months < 1) throw ValidationError("window length must be at least one month");
  if (spec.step_months < 1) throw ValidationError("window step must be at least one month");
  if (events.empty()) throw DataError("cannot enumerate windows over an empty event set");

  const YearMonth cutoff_month = YearMonth::of(events.cutoff);
  Date earliest = events.records.front().occurred_on;
  for (const auto& r : events.records) earliest = std::min(earliest, r.occurred_on);

  const YearMonth last_end = spec.last_end.value_or(cutoff_month);
  const YearMonth first_end =
      spec.first_end.value_or(YearMonth::of(earliest).plus(spec.length_months - 1));
  if (last_end > cutoff_month) {
    throw ValidationError("last window end " + last_end.str() + " is after the data cutoff " +
                          format_date(events.cutoff));
  }
  if (first_end > last_end) {
    throw ValidationError("first window end " + first_end.str() + " is after last window end " +
                          last_end.str());
  }

  // Occurrence dates sorted once so window counts are two binary searches.
  std::vector<Date> occ;
  occ.reserve(events.size());
  for (const auto& r : events.records) occ.push_back(r.occurred_on);
  std::sort(occ.begin(), occ.end());

  std::vector<Window> out;
  for (YearMonth m = first_end; m <= last_end; m = m.plus(spec.step_months)) {
    Window w;
    w.end_month = m;
    w.start = m.plus(-(spec.length_months - 1)).first_day();
    w.end = std::min(m.last_day(), events.cutoff);
    const auto lo = std::lower_bound(occ.begin(), occ.end(), w.start);
    const auto hi = std::upper_bound(occ.begin(), occ.end(), w.end);
    w.n_events = hi - lo;
    w.sparse = w.n_events < spec.min_events;
    out.push_back(w);
  }
  return out;
}

DelayHistograms DelayHistograms::from_pairs(
    const std::vector<std::pair<std::int64_t, std::int64_t>>& age_delay) {
  DelayHistograms h;
  for (const auto& [a, d] : age_delay) {
    if (a < 0 || d < 0 || d > a) {
      throw DataError("invalid (age, delay) pair (" + std::to_string(a) + ", " + std::to_string(d) + ")");
    }
    h.age_max = std::max(h.age_max, a);
    h.delta_max = std::max(h.delta_max, d);
  }
  h.age.assign(static_cast<std::size_t>(h.age_max) + 1, 0);
  h.delay.assign(static_cast<std::size_t>(h.age_max) + 1, 0);
  for (const auto& [a, d] : age_delay) {
    ++h.age[static_cast<std::size_t>(a)];
    ++h.delay[static_cast<std::size_t>(d)];
  }
  h.n_events = static_cast<std::int64_t>(age_delay.size());
  return h;
}

DelayHistograms build_histograms(const EventSet& events, const Window& window) {
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
  for (const auto& r : events.records) {
    if (r.occurred_on < window.start || r.occurred_on > window.end) continue;
    pairs.emplace_back(compute_age(r, events.cutoff), r.delay_days());
  }
  if (pairs.empty()) throw DataError("window " + window.id() + " contains no events");
  return DelayHistograms::from_pairs(pairs);
}

void write_histograms_csv(std::ostream& out, const DelayHistograms& h) {
  out << "lag,h_A,h_delta\n";
  for (std::int64_t lag = 0; lag <= h.age_max; ++lag) {
    const auto a = h.h_age(lag), d = h.h_delay(lag);
    if (a == 0 && d == 0) continue;
    out << lag << ',' << a << ',' << d << '\n';
  }
}

DelayHistograms read_histograms_csv(std::istream& in, const std::string& source) {
  const auto table = csv::read_table(in);
  const auto c_lag = table.column("lag", source);
  const auto c_a = table.column("h_A", source);
  const auto c_d = table.column("h_delta", source);
  std::vector<std::array<std::int64_t, 3>> rows;
  DelayHistograms h;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const auto field = [&](std::size_t c) {
      const auto v = c < row.size() ? parse_integer<std::int64_t>(row[c]) : std::nullopt;
      if (!v || *v < 0) throw DataError(source + ": bad histogram row " + std::to_string(i + 2));
      return *v;
    };
    const std::int64_t lag = field(c_lag), a = field(c_a), d = field(c_d);
    rows.push_back({lag, a, d});
    if (a > 0) h.age_max = std::max(h.age_max, lag);
    if (d > 0) h.delta_max = std::max(h.delta_max, lag);
  }
  if (h.delta_max > h.age_max) throw DataError(source + ": maximum delay exceeds maximum age");
  h.age.assign(static_cast<std::size_t>(h.age_max) + 1, 0);
  h.delay.assign(static_cast<std::size_t>(h.age_max) + 1, 0);
  std::int64_t na = 0, nd = 0;
  for (const auto& [lag, a, d] : rows) {
    if (a > 0) h.age[static_cast<std::size_t>(lag)] += a;
    if (d > 0) h.delay[static_cast<std::size_t>(lag)] += d;
    na += a;
    nd += d;
  }
  if (na != nd) throw DataError(source + ": h_A and h_delta totals differ");
  if (na == 0) throw DataError(source + ": histogram is empty");
  h.n_events = na;
  return h;
}

}  // namespace delaycorr
