#include "doctest.h"

#include <map>
#include <sstream>

#include "delaycorr/errors.hpp"
#include "delaycorr/ingest.hpp"
#include "delaycorr/random.hpp"

using namespace delaycorr;

namespace {

Date d(const char* s) { return *parse_date(s); }

EventRecord rec(std::string id, const char* occurred, const char* reported) {
  return {std::move(id), d(occurred), d(reported), false};
}

ParseResult parse(const std::string& text) {
  std::istringstream in(text);
  return parse_events(in);
}

}  // namespace

TEST_SUITE("ingest") {

TEST_CASE("valid row yields its delay") {
  const auto r = parse("entity_id,occurred_on,reported_on\nacme,2014-09-01,2018-11-30\n");
  REQUIRE(r.events.size() == 1);
  CHECK(r.events.records[0].delay_days() == 1551);
  CHECK(r.events.cutoff == d("2018-11-30"));
  CHECK(r.rejects.empty());
}

TEST_CASE("missing occurrence date is dropped and counted") {
  const auto r = parse("entity_id,occurred_on,reported_on\na,,2018-01-02\nb,2018-01-01,2018-01-03\n");
  CHECK(r.events.size() == 1);
  CHECK(r.dropped_missing_occurrence == 1);
  CHECK(r.rejects.empty());
}

TEST_CASE("reported before occurred is rejected") {
  const auto r = parse("entity_id,occurred_on,reported_on\nx,2018-05-02,2018-05-01\ny,2018-05-01,2018-05-02\n");
  REQUIRE(r.rejects.size() == 1);
  CHECK(r.rejects[0].reason == RejectReason::kInconsistentDates);
  CHECK(r.rejects[0].line == 2);
  CHECK(std::string(reject_code(r.rejects[0].reason)) == "INCONSISTENT_DATES");
}

TEST_CASE("malformed rows are rejected with reasons") {
  const auto r = parse(
      "entity_id,occurred_on,reported_on\n"
      "a,2018-01-01\n"
      ",2018-01-01,2018-01-02\n"
      "c,2018-01-01,\n"
      "d,2018/01/01,2018-01-02\n"
      "e,2018-01-01,2018-01-05\n");
  REQUIRE(r.rejects.size() == 4);
  CHECK(r.rejects[0].reason == RejectReason::kWrongFieldCount);
  CHECK(r.rejects[1].reason == RejectReason::kMissingEntity);
  CHECK(r.rejects[2].reason == RejectReason::kMissingReportDate);
  CHECK(r.rejects[3].reason == RejectReason::kMalformedDate);
  CHECK(r.events.size() == 1);
}

TEST_CASE("custom schema and quoting") {
  InputSchema schema;
  schema.entity_column = "org";
  schema.occurred_column = "breach";
  schema.reported_column = "notice";
  schema.delimiter = ';';
  std::istringstream in("notice;org;breach\n2018-03-01;\"Acme; Inc\";2018-01-01\n");
  const auto r = parse_events(in, schema);
  REQUIRE(r.events.size() == 1);
  CHECK(r.events.records[0].entity_id == "Acme; Inc");
  CHECK(r.events.records[0].delay_days() == 59);
}

TEST_CASE("missing column and empty input are data errors") {
  CHECK_THROWS_AS(parse("entity_id,reported_on\na,2018-01-01\n"), DataError);
  CHECK_THROWS_AS(parse("entity_id,occurred_on,reported_on\n"), DataError);
}

TEST_CASE("dedupe keeps the earliest record within a week") {
  auto one = dedupe(EventSet::from_records({rec("a", "2018-01-01", "2018-03-01"), rec("a", "2018-01-05", "2018-04-01")}));
  REQUIRE(one.size() == 1);
  CHECK(one.records[0] == rec("a", "2018-01-01", "2018-03-01"));

  auto apart = dedupe(EventSet::from_records({rec("a", "2018-01-01", "2018-03-01"), rec("a", "2018-03-01", "2018-04-01")}));
  CHECK(apart.size() == 2);

  auto distinct = dedupe(EventSet::from_records({rec("a", "2018-01-01", "2018-03-01"), rec("b", "2018-01-01", "2018-03-01")}));
  CHECK(distinct.size() == 2);
}

TEST_CASE("dedupe is idempotent on random sets") {
  Random rng{11};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<EventRecord> records;
    for (int i = 0; i < 200; ++i) {
      const Date o = add_days(d("2017-01-01"), rng.uniform_int(0, 200));
      records.push_back({"e" + std::to_string(rng.uniform_int(0, 20)), o, add_days(o, rng.uniform_int(0, 30)), false});
    }
    const auto once = dedupe(EventSet::from_records(records));
    const auto twice = dedupe(once);
    CHECK(once.records == twice.records);
  }
}

TEST_CASE("redistribution leaves a year at baseline untouched") {
  std::vector<EventRecord> records;
  for (int day = 0; day < 365; ++day) {
    const Date o = add_days(d("2017-01-01"), day);
    for (int k = 0; k < 3; ++k) records.push_back({"e" + std::to_string(day * 3 + k), o, add_days(o, 400), false});
  }
  RedistributionSummary s;
  const auto out = redistribute_default_dates(EventSet::from_records(records), 5, &s);
  CHECK(s.total_moved == 0);
  CHECK(out.size() == records.size());
}

TEST_CASE("redistribution moves the Jan-1 excess down to the baseline") {
  std::vector<EventRecord> records;
  int id = 0;
  for (int day = 1; day < 365; ++day) {
    const Date o = add_days(d("2017-01-01"), day);
    for (int k = 0; k < 10; ++k) records.push_back({"e" + std::to_string(id++), o, d("2018-06-01"), false});
  }
  for (int k = 0; k < 400; ++k) records.push_back({"e" + std::to_string(id++), d("2017-01-01"), d("2018-06-01"), false});
  RedistributionSummary s;
  const auto out = redistribute_default_dates(EventSet::from_records(records), 9, &s);
  CHECK(s.total_moved == 390);
  std::map<Date, int> daily;
  for (const auto& r : out.records) ++daily[r.occurred_on];
  CHECK(daily[d("2017-01-01")] == 10);
  CHECK(out.size() == records.size());
  // Proportional: moved records land on days in proportion to existing counts,
  // here uniform, so no day should collect a large pile.
  int worst = 0;
  for (const auto& [day, n] : daily) worst = std::max(worst, n);
  CHECK(worst < 20);
}

TEST_CASE("moved records never occur after they were reported") {
  std::vector<EventRecord> records;
  int id = 0;
  for (int day = 1; day < 365; ++day) {
    records.push_back({"e" + std::to_string(id++), add_days(d("2018-01-01"), day), d("2019-03-01"), false});
  }
  for (int k = 0; k < 50; ++k) records.push_back({"j" + std::to_string(k), d("2018-01-01"), d("2018-02-01"), false});
  const auto out = redistribute_default_dates(EventSet::from_records(records), 3);
  int moved = 0;
  for (const auto& r : out.records) {
    CHECK(r.reported_on >= r.occurred_on);
    if (r.redistributed) {
      ++moved;
      CHECK(r.occurred_on >= d("2018-01-01"));
      CHECK(r.occurred_on <= d("2018-02-01"));
    }
  }
  CHECK(moved == 49);
}

TEST_CASE("redistribution is seeded, preserves per-entity and per-year totals") {
  std::vector<EventRecord> records;
  Random rng{4};
  for (int i = 0; i < 3000; ++i) {
    const int year = 2015 + static_cast<int>(rng.uniform_int(0, 2));
    const bool jan1 = rng.uniform() < 0.2;
    const Date o = jan1 ? YearMonth{year, 1}.first_day() : add_days(YearMonth{year, 1}.first_day(), rng.uniform_int(1, 364));
    records.push_back({"e" + std::to_string(i % 700), o, add_days(o, rng.uniform_int(0, 800)), false});
  }
  const auto in = EventSet::from_records(records);
  const auto a = redistribute_default_dates(in, 77);
  const auto b = redistribute_default_dates(in, 77);
  CHECK(a.records == b.records);

  std::map<int, int> years_in, years_out;
  std::map<std::string, int> ent_in, ent_out;
  for (const auto& r : in.records) {
    ++years_in[YearMonth::of(r.occurred_on).year()];
    ++ent_in[r.entity_id];
  }
  for (const auto& r : a.records) {
    ++years_out[YearMonth::of(r.occurred_on).year()];
    ++ent_out[r.entity_id];
    CHECK(r.reported_on >= r.occurred_on);
  }
  CHECK(years_in == years_out);
  CHECK(ent_in == ent_out);
  CHECK(drop_redistributed(a).size() < a.size());
}

TEST_CASE("events csv round trips") {
  const auto set = EventSet::from_records({rec("a,b", "2018-01-01", "2018-03-01"), rec("c", "2018-02-01", "2018-02-01")});
  std::ostringstream out;
  write_events_csv(out, set);
  std::istringstream in(out.str());
  const auto back = parse_events(in);
  CHECK(back.events.records == set.records);
}

}
