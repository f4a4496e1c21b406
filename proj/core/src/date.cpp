#include "delaycorr/date.hpp"

#include <cstdio>

#include "delaycorr/numeric_format.hpp"

namespace delaycorr {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  const auto ys = text.substr(0, 4), ms = text.substr(5, 2), ds = text.substr(8, 2);
  if (!all_digits(ys) || !all_digits(ms) || !all_digits(ds)) return std::nullopt;
  const auto y = parse_integer<int>(ys);
  const auto m = parse_integer<unsigned>(ms);
  const auto d = parse_integer<unsigned>(ds);
  if (!y || !m || !d) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{*m},
                                        std::chrono::day{*d}};
  if (!ymd.ok()) return std::nullopt;
  return Date{ymd};
}

std::string format_date(Date d) {
  const std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

YearMonth YearMonth::of(Date d) {
  const std::chrono::year_month_day ymd{d};
  return YearMonth{static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month())};
}

std::optional<YearMonth> YearMonth::parse(std::string_view text) {
  if (text.size() != 7 || text[4] != '-') return std::nullopt;
  if (!all_digits(text.substr(0, 4)) || !all_digits(text.substr(5, 2))) return std::nullopt;
  const auto y = parse_integer<int>(text.substr(0, 4));
  const auto m = parse_integer<unsigned>(text.substr(5, 2));
  if (!y || !m || *m < 1 || *m > 12) return std::nullopt;
  return YearMonth{*y, *m};
}

int YearMonth::year() const {
  // Floor division keeps negative years well-defined.
  return static_cast<int>(index_ >= 0 ? index_ / 12 : (index_ - 11) / 12);
}

unsigned YearMonth::month() const {
  return static_cast<unsigned>(index_ - static_cast<std::int64_t>(year()) * 12 + 1);
}

Date YearMonth::first_day() const {
  return Date{std::chrono::year{year()} / std::chrono::month{month()} / std::chrono::day{1}};
}

Date YearMonth::last_day() const {
  return Date{std::chrono::year_month_day_last{std::chrono::year{year()},
                                               std::chrono::month_day_last{std::chrono::month{month()}}}};
}

unsigned YearMonth::length_days() const {
  return static_cast<unsigned>(days_between(first_day(), last_day()) + 1);
}

Date YearMonth::day(unsigned dom) const {
  const unsigned len = length_days();
  if (dom < 1) dom = 1;
  if (dom > len) dom = len;
  return add_days(first_day(), dom - 1);
}

std::string YearMonth::str() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u", year(), month());
  return buf;
}

}  // namespace delaycorr
