#include "fedeval/report.hpp"

#include <ctime>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fedeval/numeric.hpp"

namespace fedeval {

using nlohmann::json;

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

const std::string& CsvTable::cell(std::size_t row, const std::string& name) const {
  const int c = column(name);
  if (c < 0) throw ValidationError("report has no column '" + name + "'");
  return rows.at(row).at(static_cast<std::size_t>(c));
}

namespace {

bool needs_quoting(const std::string& field) {
  return field.find_first_of(",\"\n") != std::string::npos;
}

std::string quoted(const std::string& field) {
  if (!needs_quoting(field)) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line, std::istream& in) {
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  std::string buffer = line;
  std::size_t i = 0;
  for (;;) {
    if (i == buffer.size()) {
      if (in_quotes) {
        std::string more;
        if (!std::getline(in, more)) throw ParseError("unterminated quoted field");
        buffer += '\n';
        buffer += more;
        continue;
      }
      break;
    }
    const char c = buffer[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < buffer.size() && buffer[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
    ++i;
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string opt_str(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

json opt_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

void write_csv(std::ostream& out, const CsvTable& table) {
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i > 0) out << ',';
    out << quoted(table.header[i]);
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out << ',';
      out << quoted(row[i]);
    }
    out << '\n';
  }
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && !first) continue;
    auto fields = split_csv_line(line, in);
    if (first) {
      table.header = std::move(fields);
      first = false;
    } else {
      table.rows.push_back(std::move(fields));
    }
  }
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_csv(in);
}

CsvTable deviation_table(const DeviationReport& report) {
  CsvTable table;
  table.header = {"schema_version", "metric",       "scheme",        "centralized",
                  "weighted_average", "flam",       "abs_dev_weighted", "abs_dev_flam",
                  "sample_count",   "participants", "local_values",  "error"};
  for (const auto& cell : report.cells) {
    std::string locals;
    for (std::size_t i = 0; i < cell.local_values.size(); ++i) {
      if (i > 0) locals += ';';
      locals += format_double(cell.local_values[i]);
    }
    table.rows.push_back({std::to_string(kReportSchemaVersion), cell.spec.name(),
                          to_string(cell.scheme), opt_str(cell.centralized),
                          opt_str(cell.weighted_average), opt_str(cell.flam),
                          opt_str(cell.abs_dev_weighted), opt_str(cell.abs_dev_flam),
                          std::to_string(report.sample_count),
                          std::to_string(report.participant_count), locals, cell.error});
  }
  return table;
}

std::string deviation_json(const DeviationReport& report) {
  json rows = json::array();
  for (const auto& cell : report.cells) {
    json locals = json::array();
    for (double v : cell.local_values) locals.push_back(v);
    rows.push_back({{"schema_version", kReportSchemaVersion},
                    {"metric", cell.spec.name()},
                    {"scheme", to_string(cell.scheme)},
                    {"centralized", opt_json(cell.centralized)},
                    {"weighted_average", opt_json(cell.weighted_average)},
                    {"flam", opt_json(cell.flam)},
                    {"abs_dev_weighted", opt_json(cell.abs_dev_weighted)},
                    {"abs_dev_flam", opt_json(cell.abs_dev_flam)},
                    {"sample_count", report.sample_count},
                    {"participants", report.participant_count},
                    {"local_values", std::move(locals)},
                    {"error", cell.error}});
  }
  json doc{{"schema_version", kReportSchemaVersion}, {"rows", std::move(rows)}};
  return doc.dump(2) + "\n";
}

CsvTable sweep_table(const std::vector<SweepRow>& rows) {
  CsvTable table;
  table.header = {"skew",        "alpha", "seed", "metric", "scheme",
                  "centralized", "weighted", "flam", "deviation"};
  for (const auto& r : rows) {
    table.rows.push_back({r.skew, r.alpha, std::to_string(r.seed), r.metric, r.scheme,
                          opt_str(r.centralized), opt_str(r.weighted), opt_str(r.flam),
                          opt_str(r.deviation)});
  }
  return table;
}

std::string sweep_json(const std::vector<SweepRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"skew", r.skew},
                   {"alpha", r.alpha},
                   {"seed", r.seed},
                   {"metric", r.metric},
                   {"scheme", r.scheme},
                   {"centralized", opt_json(r.centralized)},
                   {"weighted", opt_json(r.weighted)},
                   {"flam", opt_json(r.flam)},
                   {"deviation", opt_json(r.deviation)}});
  }
  json doc{{"schema_version", kReportSchemaVersion}, {"rows", std::move(out)}};
  return doc.dump(2) + "\n";
}

void append_sweep_rows(std::vector<SweepRow>& rows, const DeviationReport& report,
                       const std::string& skew, const std::string& alpha, std::uint64_t seed) {
  for (const auto& cell : report.cells) {
    SweepRow row;
    row.skew = skew;
    row.alpha = alpha;
    row.seed = seed;
    row.metric = cell.spec.name();
    row.scheme = to_string(cell.scheme);
    row.centralized = cell.centralized;
    row.weighted = cell.weighted_average;
    row.flam = cell.flam;
    row.deviation = cell.abs_dev_weighted;
    rows.push_back(std::move(row));
  }
}

void write_report_files(const std::string& path, const CsvTable& table,
                        const std::string& json_path, const std::string& json_body) {
  {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    write_csv(out, table);
  }
  if (!json_path.empty()) {
    std::ofstream out(json_path);
    if (!out) throw IoError("cannot write " + json_path);
    out << json_body;
  }
  // Timestamped metadata goes to the sidecar, keeping the reports themselves
  // deterministic.
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  json meta{{"schema_version", kReportSchemaVersion}, {"created_at", stamp}};
  std::ofstream meta_out(path + ".meta.json");
  if (!meta_out) throw IoError("cannot write " + path + ".meta.json");
  meta_out << meta.dump(2) << "\n";
}

}  // namespace fedeval
