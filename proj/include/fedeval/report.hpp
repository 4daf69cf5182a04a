#ifndef FEDEVAL_REPORT_HPP
#define FEDEVAL_REPORT_HPP

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "fedeval/baseline.hpp"

namespace fedeval {

inline constexpr int kReportSchemaVersion = 1;

/// One parsed CSV table. Readers keep every column, known or not, so schema
/// additions never silently drop data.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 when absent
  const std::string& cell(std::size_t row, const std::string& name) const;
};

void write_csv(std::ostream& out, const CsvTable& table);
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

/// Deviation report table: one row per (metric, scheme) cell.
CsvTable deviation_table(const DeviationReport& report);
std::string deviation_json(const DeviationReport& report);

/// One sweep cell: a deviation report evaluated at (skew, alpha, seed).
struct SweepRow {
  std::string skew;
  std::string alpha;
  std::uint64_t seed = 0;
  std::string metric;
  std::string scheme;
  std::optional<double> centralized;
  std::optional<double> weighted;
  std::optional<double> flam;
  std::optional<double> deviation;  // |weighted - centralized|
};

CsvTable sweep_table(const std::vector<SweepRow>& rows);
std::string sweep_json(const std::vector<SweepRow>& rows);

void append_sweep_rows(std::vector<SweepRow>& rows, const DeviationReport& report,
                       const std::string& skew, const std::string& alpha, std::uint64_t seed);

/// Writes `table` to `path`, its JSON mirror to `json_path` when non-empty,
/// and a metadata sidecar `<path>.meta.json`. Timestamps live only in the
/// sidecar so re-runs produce byte-identical reports.
void write_report_files(const std::string& path, const CsvTable& table,
                        const std::string& json_path, const std::string& json_body);

}  // namespace fedeval

#endif  // FEDEVAL_REPORT_HPP
