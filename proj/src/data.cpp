#include "fedeval/data.hpp"

#include <string>

namespace fedeval {

std::string to_string(Task task) {
  return task == Task::classification ? "classification" : "regression";
}

Task task_from_string(const std::string& name) {
  if (name == "classification") return Task::classification;
  if (name == "regression") return Task::regression;
  throw ValidationError("unknown task: " + name);
}

namespace {

void check_labels(const std::vector<int>& labels, int class_count, const char* which) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= class_count) {
      throw DomainError(std::string(which) + " label " + std::to_string(labels[i]) +
                        " at index " + std::to_string(i) + " outside [0, " +
                        std::to_string(class_count) + ")");
    }
  }
}

}  // namespace

LabeledPredictions::LabeledPredictions(ClassificationData data) : data_(std::move(data)) {
  const auto& d = std::get<ClassificationData>(data_);
  if (d.y_true.size() != d.y_pred.size()) {
    throw ShapeError("y_true/y_pred length mismatch: " + std::to_string(d.y_true.size()) +
                     " vs " + std::to_string(d.y_pred.size()));
  }
  if (d.class_count <= 0) {
    throw ValidationError("classification data requires class_count >= 1");
  }
  check_labels(d.y_true, d.class_count, "true");
  check_labels(d.y_pred, d.class_count, "predicted");
}

LabeledPredictions::LabeledPredictions(RegressionData data) : data_(std::move(data)) {
  const auto& d = std::get<RegressionData>(data_);
  if (d.y_true.size() != d.y_pred.size()) {
    throw ShapeError("y_true/y_pred length mismatch: " + std::to_string(d.y_true.size()) +
                     " vs " + std::to_string(d.y_pred.size()));
  }
}

std::size_t LabeledPredictions::size() const {
  if (const auto* c = std::get_if<ClassificationData>(&data_)) return c->y_true.size();
  return std::get<RegressionData>(data_).y_true.size();
}

int LabeledPredictions::class_count() const {
  if (const auto* c = std::get_if<ClassificationData>(&data_)) return c->class_count;
  return 0;
}

const ClassificationData& LabeledPredictions::classification() const {
  if (const auto* c = std::get_if<ClassificationData>(&data_)) return *c;
  throw ValidationError("expected classification data, got regression");
}

const RegressionData& LabeledPredictions::regression() const {
  if (const auto* r = std::get_if<RegressionData>(&data_)) return *r;
  throw ValidationError("expected regression data, got classification");
}

Task validate_federation(std::span<const LabeledPredictions> partitions) {
  if (partitions.empty()) {
    throw ValidationError("federation has no partitions");
  }
  const Task task = partitions.front().task();
  const int class_count = partitions.front().class_count();
  for (const auto& p : partitions) {
    if (p.task() != task) {
      throw ShapeError("partitions mix classification and regression tasks");
    }
    if (task == Task::classification && p.class_count() != class_count) {
      throw ShapeError("partitions disagree on class count: " + std::to_string(class_count) +
                       " vs " + std::to_string(p.class_count()));
    }
  }
  return task;
}

LabeledPredictions concat(std::span<const LabeledPredictions> partitions) {
  const Task task = validate_federation(partitions);
  if (task == Task::classification) {
    ClassificationData all;
    all.class_count = partitions.front().class_count();
    for (const auto& p : partitions) {
      const auto& d = p.classification();
      all.y_true.insert(all.y_true.end(), d.y_true.begin(), d.y_true.end());
      all.y_pred.insert(all.y_pred.end(), d.y_pred.begin(), d.y_pred.end());
    }
    return LabeledPredictions(std::move(all));
  }
  RegressionData all;
  for (const auto& p : partitions) {
    const auto& d = p.regression();
    all.y_true.insert(all.y_true.end(), d.y_true.begin(), d.y_true.end());
    all.y_pred.insert(all.y_pred.end(), d.y_pred.begin(), d.y_pred.end());
  }
  return LabeledPredictions(std::move(all));
}

}  // namespace fedeval
