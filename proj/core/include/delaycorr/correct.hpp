#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "delaycorr/date.hpp"
#include "delaycorr/fit.hpp"
#include "delaycorr/ingest.hpp"

namespace delaycorr {

/// Occurrence-month counts of the events in the set (all of which are
/// reported by the cutoff).
std::map<YearMonth, std::int64_t> monthly_reported_counts(const EventSet& events);

/// Fraction of a month's events expected to be reported at `age` days:
/// the renormalized model CDF on [0, inf).
double correction_factor(const MixtureParams& params, double age);

/// F(age) / F(age + year_days): the fraction of the count expected one year
/// later that is already reported.
double year_ahead_factor(const MixtureParams& params, double age, double year_days = 365.0);

enum class AgeReference { kMidMonth, kMonthEnd };

struct CorrectionConfig {
  AgeReference age_reference = AgeReference::kMidMonth;
  double year_days = 365.0;
};

struct CorrectedRow {
  YearMonth month;
  std::int64_t reported = 0;
  std::int64_t age_days = 0;
  double cdf = 1.0;
  double corrected = 0.0;
  double year_ahead_factor = 1.0;
  double year_ahead = 0.0;
  /// Month precedes the first fitted window end; the earliest fit was reused.
  bool extrapolated = false;
  YearMonth fit_window;
};

struct CorrectedSeries {
  std::vector<CorrectedRow> rows;
  Date cutoff{};
};

/// Days from the month's reference day (15th, or last day) to the cutoff.
/// The reference day is clamped to the cutoff and the result to at least one
/// day. Throws ValidationError for a month after the cutoff.
std::int64_t month_age(YearMonth month, Date cutoff, AgeReference ref);

/// Corrects every month from the first counted month through the cutoff
/// month. Month m uses the successful fit whose window ends at m, else the
/// latest one ending before m; months before every window end reuse the
/// earliest fit and are flagged extrapolated.
CorrectedSeries correct_series(const std::map<YearMonth, std::int64_t>& counts, const std::vector<WindowFit>& fits,
                               Date cutoff, const CorrectionConfig& config = {});

/// `month,reported,age_days,cdf,corrected,year_ahead_factor,year_ahead`.
void write_corrected_csv(std::ostream& out, const CorrectedSeries& series);

}  // namespace delaycorr
