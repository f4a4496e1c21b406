#include "delaycorr/artifacts.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <system_error>

#include "delaycorr/csv.hpp"
#include "delaycorr/errors.hpp"
#include "delaycorr/numeric_format.hpp"

namespace delaycorr {

ArtifactWriter::ArtifactWriter(std::filesystem::path dir) : dir_{std::move(dir)} {}

void ArtifactWriter::write(std::string_view relative, std::string_view content) {
  csv::write_file_atomic(dir_ / relative, content);
  const std::string rel{relative};
  if (std::find(written_.begin(), written_.end(), rel) == written_.end()) written_.push_back(rel);
}

void ArtifactWriter::rollback() noexcept {
  for (auto it = written_.rbegin(); it != written_.rend(); ++it) {
    std::error_code ec;
    std::filesystem::remove(dir_ / *it, ec);
  }
  written_.clear();
}

void write_windows_csv(std::ostream& out, const std::vector<WindowRecord>& rows) {
  out << "window_end,start,end,n_events,sparse,age_max,delta_max,degenerate\n";
  for (const auto& r : rows) {
    out << r.window.id() << ',' << format_date(r.window.start) << ',' << format_date(r.window.end) << ','
        << r.window.n_events << ',' << (r.window.sparse ? 1 : 0) << ',' << r.age_max << ',' << r.delta_max << ','
        << (r.degenerate ? 1 : 0) << '\n';
  }
}

std::vector<WindowRecord> read_windows_csv(std::istream& in, const std::string& source) {
  const auto table = csv::read_table(in);
  const auto c_end = table.column("window_end", source);
  const auto c_start = table.column("start", source);
  const auto c_stop = table.column("end", source);
  const auto c_n = table.column("n_events", source);
  const auto c_sparse = table.column("sparse", source);
  const auto c_age = table.column("age_max", source);
  const auto c_delta = table.column("delta_max", source);
  const auto c_deg = table.column("degenerate", source);
  std::vector<WindowRecord> rows;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const auto bad = [&] { return DataError(source + ": bad row " + std::to_string(i + 2)); };
    if (row.size() < table.header.size()) throw bad();
    const auto end = YearMonth::parse(row[c_end]);
    const auto start = parse_date(row[c_start]);
    const auto stop = parse_date(row[c_stop]);
    const auto n = parse_integer<std::int64_t>(row[c_n]);
    const auto age = parse_integer<std::int64_t>(row[c_age]);
    const auto delta = parse_integer<std::int64_t>(row[c_delta]);
    if (!end || !start || !stop || !n || !age || !delta) throw bad();
    WindowRecord r;
    r.window.end_month = *end;
    r.window.start = *start;
    r.window.end = *stop;
    r.window.n_events = *n;
    r.window.sparse = row[c_sparse] == "1";
    r.age_max = *age;
    r.delta_max = *delta;
    r.degenerate = row[c_deg] == "1";
    rows.push_back(r);
  }
  return rows;
}

}  // namespace delaycorr
