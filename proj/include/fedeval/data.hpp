#ifndef FEDEVAL_DATA_HPP
#define FEDEVAL_DATA_HPP

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fedeval/errors.hpp"

namespace fedeval {

enum class Task { classification, regression };

std::string to_string(Task task);
Task task_from_string(const std::string& name);

/// Paired integer labels for a classification partition. Labels live in
/// [0, class_count); the declared class count is shared federation-wide.
struct ClassificationData {
  int class_count = 0;
  std::vector<int> y_true;
  std::vector<int> y_pred;
};

/// Paired real targets and predictions for a regression partition.
struct RegressionData {
  std::vector<double> y_true;
  std::vector<double> y_pred;
};

/// One participant's ground truth and model outputs; the local input of the
/// protocol. Construction enforces equal lengths and the label range.
class LabeledPredictions {
 public:
  explicit LabeledPredictions(ClassificationData data);
  explicit LabeledPredictions(RegressionData data);

  Task task() const {
    return std::holds_alternative<ClassificationData>(data_) ? Task::classification
                                                             : Task::regression;
  }
  std::size_t size() const;
  bool empty() const { return size() == 0; }

  /// Declared class count for classification, 0 for regression.
  int class_count() const;

  const ClassificationData& classification() const;
  const RegressionData& regression() const;

  bool operator==(const LabeledPredictions&) const = default;

 private:
  std::variant<ClassificationData, RegressionData> data_;
};

/// Concatenates partitions into one dataset, in participant order.
LabeledPredictions concat(std::span<const LabeledPredictions> partitions);

/// Checks that all partitions share one task (and one class count for
/// classification). Returns the common task; throws ShapeError otherwise.
Task validate_federation(std::span<const LabeledPredictions> partitions);

}  // namespace fedeval

#endif  // FEDEVAL_DATA_HPP
