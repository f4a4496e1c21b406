#include "delaycorr/correct.hpp"

#include <algorithm>
#include <ostream>

#include "delaycorr/errors.hpp"
#include "delaycorr/numeric_format.hpp"

namespace delaycorr {

std::map<YearMonth, std::int64_t> monthly_reported_counts(const EventSet& events) {
  std::map<YearMonth, std::int64_t> counts;
  for (const auto& r : events.records) {
    if (r.reported_on > events.cutoff) continue;
    ++counts[YearMonth::of(r.occurred_on)];
  }
  return counts;
}

double correction_factor(const MixtureParams& params, double age) {
  if (!(age >= 0.0)) throw ValidationError("age must be non-negative");
  return renormalized_cdf(params, age);
}

double year_ahead_factor(const MixtureParams& params, double age, double year_days) {
  if (!(age >= 0.0)) throw ValidationError("age must be non-negative");
  const MixtureModel model{params};
  const double later = model.cdf(age + year_days);
  if (!(later > 0.0)) throw ValidationError("degenerate mixture: zero CDF one year ahead for " + params.str());
  return model.cdf(age) / later;
}

std::int64_t month_age(YearMonth month, Date cutoff, AgeReference ref) {
  if (month > YearMonth::of(cutoff)) {
    throw ValidationError("month " + month.str() + " is after the cutoff " + format_date(cutoff));
  }
  Date day = ref == AgeReference::kMidMonth ? month.day(15) : month.last_day();
  day = std::min(day, cutoff);
  return std::max<std::int64_t>(1, days_between(day, cutoff));
}

CorrectedSeries correct_series(const std::map<YearMonth, std::int64_t>& counts, const std::vector<WindowFit>& fits,
                               Date cutoff, const CorrectionConfig& config) {
  std::vector<const WindowFit*> usable;
  for (const auto& f : fits) {
    if (!f.failed) usable.push_back(&f);
  }
  if (usable.empty()) throw FitError("no successful window fit available for correction");
  std::sort(usable.begin(), usable.end(),
            [](const WindowFit* a, const WindowFit* b) { return a->window.end_month < b->window.end_month; });

  CorrectedSeries series;
  series.cutoff = cutoff;
  if (counts.empty()) return series;

  const YearMonth last = YearMonth::of(cutoff);
  if (counts.rbegin()->first > last) {
    throw ValidationError("counts include month " + counts.rbegin()->first.str() + " after the cutoff");
  }
  for (YearMonth m = counts.begin()->first; m <= last; m = m.plus(1)) {
    CorrectedRow row;
    row.month = m;
    if (const auto it = counts.find(m); it != counts.end()) row.reported = it->second;

    // Latest usable fit ending at or before m.
    const auto it = std::upper_bound(usable.begin(), usable.end(), m,
                                     [](YearMonth month, const WindowFit* f) { return month < f->window.end_month; });
    const WindowFit* fit = nullptr;
    if (it == usable.begin()) {
      fit = usable.front();
      row.extrapolated = true;
    } else {
      fit = *std::prev(it);
    }
    row.fit_window = fit->window.end_month;

    row.age_days = month_age(m, cutoff, config.age_reference);
    const double age = static_cast<double>(row.age_days);
    row.cdf = correction_factor(fit->params, age);
    if (!(row.cdf > 0.0)) {
      throw DataError("month " + m.str() + ": modeled reporting probability is zero at age " +
                      std::to_string(row.age_days));
    }
    row.corrected = static_cast<double>(row.reported) / row.cdf;
    row.year_ahead_factor = year_ahead_factor(fit->params, age, config.year_days);
    row.year_ahead = static_cast<double>(row.reported) / row.year_ahead_factor;
    series.rows.push_back(row);
  }
  return series;
}

void write_corrected_csv(std::ostream& out, const CorrectedSeries& series) {
  out << "month,reported,age_days,cdf,corrected,year_ahead_factor,year_ahead\n";
  for (const auto& r : series.rows) {
    out << r.month.str() << ',' << r.reported << ',' << r.age_days << ',' << format_double(r.cdf) << ','
        << format_double(r.corrected) << ',' << format_double(r.year_ahead_factor) << ','
        << format_double(r.year_ahead) << '\n';
  }
}

}  // namespace delaycorr
