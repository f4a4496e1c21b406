#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "delaycorr/windows.hpp"

namespace delaycorr {

/// Writes files under one output directory, each atomically, and remembers
/// them so that a failed run can remove what it produced.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path path(std::string_view relative) const { return dir_ / relative; }

  void write(std::string_view relative, std::string_view content);
  /// Relative paths written so far, in write order.
  const std::vector<std::string>& written() const { return written_; }
  /// Deletes every file written by this writer.
  void rollback() noexcept;

 private:
  std::filesystem::path dir_;
  std::vector<std::string> written_;
};

/// Per-window summary row of windows.csv.
struct WindowRecord {
  Window window;
  std::int64_t age_max = 0;
  std::int64_t delta_max = 0;
  bool degenerate = false;
};

/// `window_end,start,end,n_events,sparse,age_max,delta_max,degenerate`.
void write_windows_csv(std::ostream& out, const std::vector<WindowRecord>& rows);
std::vector<WindowRecord> read_windows_csv(std::istream& in, const std::string& source);

}  // namespace delaycorr
