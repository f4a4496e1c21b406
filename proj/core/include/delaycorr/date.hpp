#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace delaycorr {

/// Calendar date at day resolution.
using Date = std::chrono::sys_days;

/// Parses a strict ISO-8601 calendar date (YYYY-MM-DD). Returns nullopt on
/// any malformed or non-existent date.
std::optional<Date> parse_date(std::string_view text);

std::string format_date(Date d);

/// Whole days from `from` to `to` (negative when `to` precedes `from`).
inline std::int64_t days_between(Date from, Date to) {
  return (to - from).count();
}

inline Date add_days(Date d, std::int64_t n) {
  return d + std::chrono::days{n};
}

/// A calendar month, stored as a linear month index so that arithmetic and
/// ordering are trivial.
class YearMonth {
 public:
  constexpr YearMonth() = default;
  constexpr YearMonth(int year, unsigned month)
      : index_{static_cast<std::int64_t>(year) * 12 + static_cast<std::int64_t>(month) - 1} {}

  static YearMonth of(Date d);
  /// Parses "YYYY-MM".
  static std::optional<YearMonth> parse(std::string_view text);

  int year() const;
  unsigned month() const;

  Date first_day() const;
  Date last_day() const;
  /// The given day of the month, clamped to the month's length.
  Date day(unsigned dom) const;
  unsigned length_days() const;

  YearMonth plus(std::int64_t months) const {
    YearMonth r;
    r.index_ = index_ + months;
    return r;
  }
  std::int64_t months_until(YearMonth other) const { return other.index_ - index_; }

  std::string str() const;

  auto operator<=>(const YearMonth&) const = default;

 private:
  std::int64_t index_ = 0;
};

}  // namespace delaycorr
