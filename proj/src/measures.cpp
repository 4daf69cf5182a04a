#include "fedeval/measures.hpp"

#include <algorithm>

#include "fedeval/numeric.hpp"

namespace fedeval {

std::string to_string(StatisticId id) {
  switch (id) {
    case StatisticId::global_mean: return "global_mean";
  }
  return "?";
}

StatisticId statistic_id_from_string(const std::string& name) {
  if (name == "global_mean") return StatisticId::global_mean;
  throw ValidationError("unknown statistic: " + name);
}

StatisticPlan statistic_plan(const MetricSpec& spec) {
  spec.validate();
  if (spec.kind == MetricKind::r2) return {{StatisticId::global_mean}};
  return {};
}

ClassificationAm compute_classification_am(const LabeledPredictions& data) {
  return {confusion_from_labels(data)};
}

RegressionAm compute_regression_am(const LabeledPredictions& data, double global_mean) {
  const auto& d = data.regression();
  CompensatedSum residual, deviation;
  for (std::size_t i = 0; i < d.y_true.size(); ++i) {
    const double r = d.y_true[i] - d.y_pred[i];
    const double t = d.y_true[i] - global_mean;
    residual += r * r;
    deviation += t * t;
  }
  return {residual.value(), deviation.value(), static_cast<std::int64_t>(d.y_true.size())};
}

MeanStatistic compute_mean_statistic(const LabeledPredictions& data) {
  const auto& d = data.regression();
  CompensatedSum sum;
  for (double y : d.y_true) sum += y;
  return {sum.value(), static_cast<std::int64_t>(d.y_true.size())};
}

AggregatableMeasure aggregate_ams(std::span<const AggregatableMeasure> measures) {
  if (measures.empty()) throw ValidationError("nothing to aggregate");
  if (std::holds_alternative<ClassificationAm>(measures.front())) {
    ClassificationAm total = std::get<ClassificationAm>(measures.front());
    for (std::size_t i = 1; i < measures.size(); ++i) {
      const auto* am = std::get_if<ClassificationAm>(&measures[i]);
      if (am == nullptr) throw ShapeError("mixed measure variants in aggregation");
      total.confusion += am->confusion;
    }
    return total;
  }
  const auto& first = std::get<RegressionAm>(measures.front());
  CompensatedSum residual(0.0), deviation(0.0);
  residual += first.residual_sq_sum;
  deviation += first.deviation_sq_sum;
  std::int64_t count = first.count;
  for (std::size_t i = 1; i < measures.size(); ++i) {
    const auto* am = std::get_if<RegressionAm>(&measures[i]);
    if (am == nullptr) throw ShapeError("mixed measure variants in aggregation");
    residual += am->residual_sq_sum;
    deviation += am->deviation_sq_sum;
    count += am->count;
  }
  return RegressionAm{residual.value(), deviation.value(), count};
}

MetricValue metric_from_am(const AggregatableMeasure& am, const MetricSpec& spec) {
  spec.validate();
  if (const auto* cls = std::get_if<ClassificationAm>(&am)) {
    if (spec.kind == MetricKind::r2) {
      throw ValidationError("r2 cannot be computed from a classification measure");
    }
    MetricValue value = metric_from_confusion(cls->confusion, spec);
    value.mode = EvalMode::flam;
    return value;
  }
  const auto& reg = std::get<RegressionAm>(am);
  if (spec.kind != MetricKind::r2) {
    throw ValidationError(spec.name() + " cannot be computed from a regression measure");
  }
  if (reg.count == 0) throw UndefinedMetricError("metric undefined over zero samples");
  if (reg.deviation_sq_sum == 0.0) {
    throw DegenerateVarianceError("r2 undefined: target has zero total variance");
  }
  return {spec, EvalMode::flam, 1.0 - reg.residual_sq_sum / reg.deviation_sq_sum, reg.count};
}

namespace {

double global_mean_of(std::span<const LabeledPredictions> partitions) {
  MeanStatistic total;
  for (const auto& p : partitions) total += compute_mean_statistic(p);
  return total.mean();
}

}  // namespace

std::vector<MetricValue> flam_evaluate(std::span<const LabeledPredictions> partitions,
                                       std::span<const MetricSpec> specs) {
  const Task task = validate_federation(partitions);
  bool needs_mean = false;
  for (const auto& spec : specs) {
    spec.validate();
    if (spec.task() != task) {
      throw ValidationError(spec.name() + " does not apply to " + to_string(task) +
                            " partitions");
    }
    needs_mean = needs_mean || !statistic_plan(spec).empty();
  }
  if (specs.empty()) return {};

  const double mean = needs_mean ? global_mean_of(partitions) : 0.0;
  std::vector<AggregatableMeasure> measures;
  measures.reserve(partitions.size());
  for (const auto& p : partitions) {
    if (task == Task::classification) {
      measures.emplace_back(compute_classification_am(p));
    } else {
      measures.emplace_back(compute_regression_am(p, mean));
    }
  }
  const AggregatableMeasure total = aggregate_ams(measures);

  std::vector<MetricValue> results;
  results.reserve(specs.size());
  for (const auto& spec : specs) results.push_back(metric_from_am(total, spec));
  return results;
}

MetricValue flam_evaluate(std::span<const LabeledPredictions> partitions,
                          const MetricSpec& spec) {
  return flam_evaluate(partitions, std::span<const MetricSpec>(&spec, 1)).front();
}

}  // namespace fedeval
