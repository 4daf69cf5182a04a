#include "fedeval/predictors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "fedeval/numeric.hpp"
#include "fedeval/rng.hpp"

namespace fedeval {

namespace {
enum : std::uint64_t { kClassifierStream = 11, kRegressorStream = 12 };
}

void ConfusionKernel::validate() const {
  if (class_count <= 0 || rows.size() != static_cast<std::size_t>(class_count) * class_count) {
    throw ValidationError("kernel must be a C x C matrix with C >= 1");
  }
  for (int j = 0; j < class_count; ++j) {
    double sum = 0.0;
    for (int k = 0; k < class_count; ++k) {
      const double v = at(j, k);
      if (v < 0.0) {
        throw ValidationError("kernel row " + std::to_string(j) + " has a negative entry");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw ValidationError("kernel row " + std::to_string(j) + " sums to " +
                            format_double(sum) + ", expected 1");
    }
  }
}

ConfusionKernel ConfusionKernel::identity(int class_count, std::uint64_t seed) {
  ConfusionKernel k{class_count, std::vector<double>(
                                     static_cast<std::size_t>(class_count) * class_count, 0.0),
                    seed};
  for (int j = 0; j < class_count; ++j) k.rows[static_cast<std::size_t>(j) * class_count + j] = 1.0;
  return k;
}

ConfusionKernel ConfusionKernel::uniform(int class_count, std::uint64_t seed) {
  return {class_count,
          std::vector<double>(static_cast<std::size_t>(class_count) * class_count,
                              1.0 / class_count),
          seed};
}

ConfusionKernel ConfusionKernel::diagonal(int class_count, double diagonal, std::uint64_t seed) {
  if (class_count == 1) return identity(class_count, seed);
  ConfusionKernel k{class_count,
                    std::vector<double>(static_cast<std::size_t>(class_count) * class_count,
                                        (1.0 - diagonal) / (class_count - 1)),
                    seed};
  for (int j = 0; j < class_count; ++j) k.rows[static_cast<std::size_t>(j) * class_count + j] = diagonal;
  k.validate();
  return k;
}

ConfusionKernel ConfusionKernel::local_confusion(int class_count, double diagonal,
                                                 const std::set<int>& confused_with,
                                                 std::uint64_t seed) {
  ConfusionKernel k{class_count, std::vector<double>(
                                     static_cast<std::size_t>(class_count) * class_count, 0.0),
                    seed};
  for (int j = 0; j < class_count; ++j) {
    std::vector<int> others;
    for (int c : confused_with) {
      if (c != j) others.push_back(c);
    }
    double* row = &k.rows[static_cast<std::size_t>(j) * class_count];
    if (others.empty()) {
      row[j] = 1.0;
      continue;
    }
    row[j] = diagonal;
    for (int c : others) row[c] += (1.0 - diagonal) / static_cast<double>(others.size());
  }
  k.validate();
  return k;
}

std::vector<int> predict_classification(std::span<const int> labels,
                                        const ConfusionKernel& kernel) {
  kernel.validate();
  std::vector<int> predictions(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int label = labels[i];
    if (label < 0 || label >= kernel.class_count) {
      throw DomainError("label " + std::to_string(label) + " at index " + std::to_string(i) +
                        " outside [0, " + std::to_string(kernel.class_count) + ")");
    }
    CounterRng rng(kernel.seed, {kClassifierStream, i});
    const std::span<const double> row(&kernel.rows[static_cast<std::size_t>(label) * kernel.class_count],
                                      static_cast<std::size_t>(kernel.class_count));
    predictions[i] = rng.next_categorical(row);
  }
  return predictions;
}

void NoisyRegressor::validate() const {
  if (noise_sigma < 0.0) throw ValidationError("noise sigma must be non-negative");
}

std::vector<double> predict_regression(std::span<const double> y_true,
                                       const NoisyRegressor& model) {
  model.validate();
  std::vector<double> predictions(y_true.size());
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    double noise = 0.0;
    if (model.noise_sigma > 0.0) {
      CounterRng rng(model.seed, {kRegressorStream, i});
      noise = model.noise_sigma * rng.next_normal();
    }
    predictions[i] = y_true[i] + model.bias + noise;
  }
  return predictions;
}

namespace {

constexpr const char* kHeader = "participant_id,y_true,y_pred";

struct RawRow {
  int participant;
  std::string y_true;
  std::string y_pred;
};

std::vector<RawRow> read_rows(std::istream& in) {
  std::vector<RawRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line == kHeader) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 3 comma-separated fields");
    }
    RawRow row;
    try {
      std::size_t used = 0;
      const std::string id_field = line.substr(0, c1);
      row.participant = std::stoi(id_field, &used);
      if (used != id_field.size()) throw std::invalid_argument(id_field);
    } catch (const std::exception&) {
      throw ParseError("line " + std::to_string(line_no) + ": malformed participant id");
    }
    if (row.participant < 0) {
      throw ParseError("line " + std::to_string(line_no) + ": participant id must be >= 0");
    }
    row.y_true = line.substr(c1 + 1, c2 - c1 - 1);
    row.y_pred = line.substr(c2 + 1);
    rows.push_back(std::move(row));
  }
  return rows;
}

int parse_label(const std::string& field, std::size_t row_index) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(field, &used);
    if (used != field.size()) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw ParseError("row " + std::to_string(row_index) + ": malformed label '" + field + "'");
  }
}

double parse_value(const std::string& field, std::size_t row_index) {
  bool ok = false;
  const double v = parse_double(field, ok);
  if (!ok) {
    throw ParseError("row " + std::to_string(row_index) + ": malformed value '" + field + "'");
  }
  return v;
}

}  // namespace

Federation ingest_predictions(std::istream& in, Task task, std::optional<int> class_count) {
  const auto rows = read_rows(in);
  if (rows.empty()) throw ValidationError("empty federation: no data rows");

  Federation federation;
  if (task == Task::classification) {
    std::map<int, ClassificationData> by_id;
    int max_label = -1;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      auto& part = by_id[rows[r].participant];
      part.y_true.push_back(parse_label(rows[r].y_true, r + 1));
      part.y_pred.push_back(parse_label(rows[r].y_pred, r + 1));
      max_label = std::max({max_label, part.y_true.back(), part.y_pred.back()});
    }
    const int c = class_count.value_or(max_label + 1);
    for (auto& [id, part] : by_id) {
      part.class_count = c;
      federation.participant_ids.push_back(id);
      // LabeledPredictions construction enforces the label range.
      federation.partitions.emplace_back(std::move(part));
    }
  } else {
    std::map<int, RegressionData> by_id;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      auto& part = by_id[rows[r].participant];
      part.y_true.push_back(parse_value(rows[r].y_true, r + 1));
      part.y_pred.push_back(parse_value(rows[r].y_pred, r + 1));
    }
    for (auto& [id, part] : by_id) {
      federation.participant_ids.push_back(id);
      federation.partitions.emplace_back(std::move(part));
    }
  }
  return federation;
}

Federation ingest_predictions(const std::string& path, Task task,
                              std::optional<int> class_count) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return ingest_predictions(in, task, class_count);
}

void emit_predictions(std::ostream& out, const Federation& federation) {
  out << kHeader << '\n';
  for (std::size_t p = 0; p < federation.partitions.size(); ++p) {
    const int id = federation.participant_ids[p];
    const auto& part = federation.partitions[p];
    if (part.task() == Task::classification) {
      const auto& d = part.classification();
      for (std::size_t i = 0; i < d.y_true.size(); ++i) {
        out << id << ',' << d.y_true[i] << ',' << d.y_pred[i] << '\n';
      }
    } else {
      const auto& d = part.regression();
      for (std::size_t i = 0; i < d.y_true.size(); ++i) {
        out << id << ',' << format_double(d.y_true[i]) << ',' << format_double(d.y_pred[i])
            << '\n';
      }
    }
  }
}

void emit_predictions(const std::string& path, const Federation& federation) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  emit_predictions(out, federation);
}

}  // namespace fedeval
