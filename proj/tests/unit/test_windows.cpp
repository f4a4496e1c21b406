#include "doctest.h"

#include <sstream>

#include "delaycorr/errors.hpp"
#include "delaycorr/random.hpp"
#include "delaycorr/windows.hpp"

using namespace delaycorr;

namespace {

Date d(const char* s) { return *parse_date(s); }

EventSet span_set(const char* first, const char* last_reported) {
  return EventSet::from_records({{"a", d(first), d(first), false}, {"b", d(first), d(last_reported), false}});
}

}  // namespace

TEST_SUITE("windows") {

TEST_CASE("ages against the cutoff") {
  const Date cutoff = d("2018-12-31");
  CHECK(compute_age({"x", d("2018-12-01"), d("2018-12-02"), false}, cutoff) == 30);
  CHECK(compute_age({"x", cutoff, cutoff, false}, cutoff) == 0);
  CHECK(compute_age({"x", d("2012-07-01"), d("2013-01-01"), false}, cutoff) == 2374);
  CHECK_THROWS_AS(compute_age({"x", d("2019-01-01"), d("2019-01-01"), false}, cutoff), DataError);
}

TEST_CASE("rolling two-year windows") {
  const auto events = span_set("2012-07-01", "2018-12-31");
  WindowSpec spec;
  spec.first_end = YearMonth{2014, 6};
  spec.last_end = YearMonth{2014, 8};
  const auto w = enumerate_windows(events, spec);
  REQUIRE(w.size() == 3);
  CHECK(format_date(w[0].start) == "2012-07-01");
  CHECK(format_date(w[0].end) == "2014-06-30");
  CHECK(format_date(w[1].start) == "2012-08-01");
  CHECK(w[1].id() == "2014-07");

  spec.first_end = YearMonth{2018, 12};
  spec.last_end = YearMonth{2018, 12};
  const auto last = enumerate_windows(events, spec);
  REQUIRE(last.size() == 1);
  CHECK(format_date(last[0].start) == "2017-01-01");
  CHECK(format_date(last[0].end) == "2018-12-31");
}

TEST_CASE("window ends are validated against the cutoff") {
  const auto events = span_set("2016-01-10", "2018-06-15");
  WindowSpec spec;
  spec.last_end = YearMonth{2018, 7};
  CHECK_THROWS_AS(enumerate_windows(events, spec), ValidationError);
  spec.last_end = YearMonth{2018, 6};
  spec.first_end = YearMonth{2018, 7};
  CHECK_THROWS_AS(enumerate_windows(events, spec), ValidationError);

  // Default first end is the first full window, last end the cutoff month,
  // and the final window is clipped to the cutoff.
  const auto w = enumerate_windows(events, WindowSpec{});
  CHECK(w.front().id() == "2017-12");
  CHECK(w.back().id() == "2018-06");
  CHECK(format_date(w.back().end) == "2018-06-15");
  CHECK(w.front().sparse);
}

TEST_CASE("histogram counts") {
  const auto h = DelayHistograms::from_pairs({{400, 0}, {400, 31}});
  CHECK(h.h_delay(0) == 1);
  CHECK(h.h_delay(31) == 1);
  CHECK(h.h_age(400) == 2);
  CHECK(h.delta_max == 31);
  CHECK(h.age_max == 400);
  CHECK(h.n_events == 2);
}

TEST_CASE("events reported after the window end still count") {
  const auto events = EventSet::from_records({{"a", d("2016-06-01"), d("2018-03-01"), false},
                                              {"b", d("2018-05-01"), d("2018-12-31"), false}});
  Window w;
  w.end_month = YearMonth{2016, 12};
  w.start = d("2015-01-01");
  w.end = d("2016-12-31");
  const auto h = build_histograms(events, w);
  CHECK(h.n_events == 1);
  CHECK(h.delta_max == 638);
  CHECK(h.age_max == days_between(d("2016-06-01"), d("2018-12-31")));
}

TEST_CASE("histogram totals and shift invariance on random sets") {
  Random rng{21};
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<EventRecord> records;
    for (int i = 0; i < 500; ++i) {
      const Date o = add_days(d("2015-01-01"), rng.uniform_int(0, 1400));
      records.push_back({"e" + std::to_string(i), o, add_days(o, rng.uniform_int(0, 300)), false});
    }
    auto events = EventSet::from_records(records);
    const auto windows = enumerate_windows(events, WindowSpec{});
    for (const auto& w : windows) {
      const auto h = build_histograms(events, w);
      std::int64_t sa = 0, sd = 0, recount = 0;
      for (auto v : h.age) sa += v;
      for (auto v : h.delay) sd += v;
      for (const auto& r : records) recount += (r.occurred_on >= w.start && r.occurred_on <= w.end) ? 1 : 0;
      CHECK(sa == h.n_events);
      CHECK(sd == h.n_events);
      CHECK(recount == h.n_events);
      CHECK(h.age.back() > 0);
      CHECK(h.h_delay(h.delta_max) > 0);

      auto shifted = events;
      shifted.cutoff = add_days(events.cutoff, 17);
      const auto hs = build_histograms(shifted, w);
      CHECK(hs.age_max == h.age_max + 17);
      CHECK(hs.h_age(h.age_max + 17) == h.h_age(h.age_max));
      for (std::int64_t lag = 0; lag <= h.delta_max; ++lag) CHECK(hs.h_delay(lag) == h.h_delay(lag));
    }
  }
}

TEST_CASE("histogram csv round trip") {
  const auto h = DelayHistograms::from_pairs({{10, 0}, {10, 3}, {7, 3}, {3, 1}});
  std::ostringstream out;
  write_histograms_csv(out, h);
  std::istringstream in(out.str());
  const auto back = read_histograms_csv(in, "mem");
  CHECK(back.age == h.age);
  CHECK(back.delay == h.delay);
  CHECK(back.n_events == h.n_events);
  CHECK(back.delta_max == h.delta_max);
}

}
