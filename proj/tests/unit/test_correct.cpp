#include "doctest.h"

#include <cmath>
#include <sstream>

#include "delaycorr/correct.hpp"
#include "delaycorr/errors.hpp"

using namespace delaycorr;

namespace {

Date d(const char* s) { return *parse_date(s); }

const MixtureParams kRef{0.5, 100.0, 300.0, 50.0};

WindowFit fit_at(YearMonth end, MixtureParams p) {
  WindowFit f;
  f.window.end_month = end;
  f.params = p;
  return f;
}

}  // namespace

TEST_SUITE("correct") {

TEST_CASE("monthly counts by occurrence month") {
  const auto events = EventSet::from_records({{"a", d("2018-06-01"), d("2018-07-01"), false},
                                              {"b", d("2018-06-15"), d("2018-06-20"), false},
                                              {"c", d("2018-06-30"), d("2018-12-31"), false},
                                              {"d", d("2017-02-03"), d("2018-01-01"), false}});
  const auto counts = monthly_reported_counts(events);
  CHECK(counts.at(YearMonth{2018, 6}) == 3);
  CHECK(counts.at(YearMonth{2017, 2}) == 1);
  std::int64_t total = 0;
  for (const auto& [m, n] : counts) total += n;
  CHECK(total == static_cast<std::int64_t>(events.size()));
}

TEST_CASE("correction factor values") {
  CHECK(correction_factor(kRef, 300.0) == doctest::Approx(0.72510646568046474618).epsilon(1e-13));
  CHECK(100.0 / correction_factor(kRef, 300.0) == doctest::Approx(100.0 / 0.72510646568046474618).epsilon(1e-13));
  CHECK(correction_factor(kRef, 300.0 + 6 * 50.0 + 10 * 100.0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(correction_factor(kRef, -1.0), ValidationError);
}

TEST_CASE("year-ahead factor") {
  CHECK(year_ahead_factor(kRef, 300.0) == doctest::Approx(0.72557592132144037158).epsilon(1e-13));
  CHECK(year_ahead_factor(kRef, 5000.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(year_ahead_factor(kRef, 300.0) >= correction_factor(kRef, 300.0));
}

TEST_CASE("month ages") {
  const Date cutoff = d("2018-12-31");
  CHECK(month_age(YearMonth{2018, 12}, cutoff, AgeReference::kMidMonth) == 16);
  CHECK(month_age(YearMonth{2018, 11}, cutoff, AgeReference::kMidMonth) == 46);
  CHECK(month_age(YearMonth{2018, 11}, cutoff, AgeReference::kMonthEnd) == 31);
  CHECK(month_age(YearMonth{2018, 12}, cutoff, AgeReference::kMonthEnd) == 1);
  CHECK(month_age(YearMonth{2018, 12}, d("2018-12-10"), AgeReference::kMidMonth) == 1);
  CHECK_THROWS_AS(month_age(YearMonth{2019, 1}, cutoff, AgeReference::kMidMonth), ValidationError);
}

TEST_CASE("series uses the fit of the window ending at each month") {
  const MixtureParams early{0.5, 100.0, 300.0, 50.0};
  const MixtureParams late{0.2, 60.0, 400.0, 80.0};
  const std::vector<WindowFit> fits{fit_at(YearMonth{2018, 6}, early), fit_at(YearMonth{2018, 9}, late)};
  std::map<YearMonth, std::int64_t> counts{{YearMonth{2018, 1}, 500}, {YearMonth{2018, 7}, 400}, {YearMonth{2018, 12}, 50}};
  const auto s = correct_series(counts, fits, d("2018-12-31"));
  REQUIRE(s.rows.size() == 12);
  CHECK(s.rows[0].extrapolated);
  CHECK(s.rows[0].fit_window == YearMonth{2018, 6});
  CHECK(s.rows[1].reported == 0);
  CHECK(s.rows[6].fit_window == YearMonth{2018, 6});
  CHECK_FALSE(s.rows[6].extrapolated);
  CHECK(s.rows[8].fit_window == YearMonth{2018, 9});
  const auto& last = s.rows.back();
  CHECK(last.age_days == 16);
  CHECK(last.cdf == doctest::Approx(renormalized_cdf(late, 16.0)));
  CHECK(last.corrected == doctest::Approx(50.0 / renormalized_cdf(late, 16.0)));
  CHECK(last.year_ahead <= last.corrected);

  // The most recent month gets the largest correction.
  for (const auto& r : s.rows) CHECK(r.cdf >= last.cdf);
}

TEST_CASE("failed fits are skipped; none usable is an error") {
  auto bad = fit_at(YearMonth{2018, 12}, kRef);
  bad.failed = true;
  std::map<YearMonth, std::int64_t> counts{{YearMonth{2018, 12}, 5}};
  CHECK_THROWS_AS(correct_series(counts, {bad}, d("2018-12-31")), FitError);
  const auto s = correct_series(counts, {fit_at(YearMonth{2018, 1}, kRef), bad}, d("2018-12-31"));
  CHECK(s.rows[0].fit_window == YearMonth{2018, 1});
}

TEST_CASE("old months are barely corrected") {
  std::map<YearMonth, std::int64_t> counts{{YearMonth{2010, 1}, 100}};
  const auto s = correct_series(counts, {fit_at(YearMonth{2012, 1}, kRef)}, d("2018-12-31"));
  CHECK(s.rows.front().corrected == doctest::Approx(100.0).epsilon(1e-9));
}

TEST_CASE("csv layout") {
  std::map<YearMonth, std::int64_t> counts{{YearMonth{2018, 12}, 5}};
  const auto s = correct_series(counts, {fit_at(YearMonth{2018, 12}, kRef)}, d("2018-12-31"));
  std::ostringstream out;
  write_corrected_csv(out, s);
  CHECK(out.str().rfind("month,reported,age_days,cdf,corrected,year_ahead_factor,year_ahead\n2018-12,5,16,", 0) == 0);
}

}
