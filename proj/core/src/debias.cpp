#include "delaycorr/debias.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "delaycorr/csv.hpp"
#include "delaycorr/errors.hpp"
#include "delaycorr/numeric_format.hpp"

namespace delaycorr {

DebiasedDistribution compute_delay_distribution(const DelayHistograms& h) {
  if (h.n_events <= 0 || h.age.empty()) throw DataError("cannot debias an empty histogram");
  if (h.delta_max > h.age_max) throw DataError("maximum delay exceeds maximum age");

  const std::int64_t top = h.age_max;
  DebiasedDistribution dist;
  dist.age_max = top;
  dist.delta_max = h.delta_max;
  dist.pmf.assign(static_cast<std::size_t>(top) + 1, 0.0);
  dist.cdf.assign(static_cast<std::size_t>(top) + 1, 0.0);

  double cdf = 1.0;  // F(d), updated to F(d-1) at the end of each step
  double denom = 0.0;
  for (std::int64_t d = top; d >= 0; --d) {
    const auto i = static_cast<std::size_t>(d);
    dist.cdf[i] = cdf;
    // Running form of the denominator: add the age-d term once F(d) is known.
    if (const auto ha = h.age[i]; ha > 0) {
      double fa = cdf;
      if (fa < kCdfFloor) {
        fa = kCdfFloor;
        dist.degenerate = true;
      }
      denom += static_cast<double>(ha) / fa;
    }
    double f = 0.0;
    if (const auto hd = h.delay[i]; hd > 0) {
      f = static_cast<double>(hd) / denom;
      if (f > cdf) {
        f = std::max(cdf, 0.0);
        dist.degenerate = true;
      }
    }
    dist.pmf[i] = f;
    cdf -= f;
  }
  return dist;
}

double empirical_cdf_at(const DebiasedDistribution& dist, double lag) {
  if (!(lag >= 0.0)) throw ValidationError("lag must be non-negative");
  if (lag >= static_cast<double>(dist.age_max)) return 1.0;
  return dist.cdf[static_cast<std::size_t>(std::floor(lag))];
}

void write_distribution_csv(std::ostream& out, const DebiasedDistribution& dist) {
  out << "lag,f,F,degenerate_flag\n";
  const char* flag = dist.degenerate ? "1" : "0";
  for (std::size_t i = 0; i < dist.pmf.size(); ++i) {
    out << i << ',' << format_double(dist.pmf[i]) << ',' << format_double(dist.cdf[i]) << ',' << flag
        << '\n';
  }
}

DebiasedDistribution read_distribution_csv(std::istream& in, const std::string& source) {
  const auto table = csv::read_table(in);
  const auto c_lag = table.column("lag", source);
  const auto c_f = table.column("f", source);
  const auto c_F = table.column("F", source);
  const auto c_flag = table.column("degenerate_flag", source);
  if (table.rows.empty()) throw DataError(source + ": empty distribution");
  DebiasedDistribution dist;
  dist.pmf.resize(table.rows.size());
  dist.cdf.resize(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const auto bad = [&] { return DataError(source + ": bad row " + std::to_string(i + 2)); };
    if (row.size() < table.header.size()) throw bad();
    const auto lag = parse_integer<std::size_t>(row[c_lag]);
    const auto f = parse_double(row[c_f]);
    const auto F = parse_double(row[c_F]);
    if (!lag || *lag != i || !f || !F) throw bad();
    dist.pmf[i] = *f;
    dist.cdf[i] = *F;
    if (*f > 0.0) dist.delta_max = static_cast<std::int64_t>(i);
    if (row[c_flag] == "1") dist.degenerate = true;
  }
  dist.age_max = static_cast<std::int64_t>(table.rows.size()) - 1;
  return dist;
}

}  // namespace delaycorr
