#ifndef FEDEVAL_MEASURES_HPP
#define FEDEVAL_MEASURES_HPP

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fedeval/metrics.hpp"

namespace fedeval {

/// Classification measure exchanged with the coordinator: the full confusion
/// matrix. It is additive under concatenation and subsumes the per-metric
/// count tuples, so one message serves every classification metric.
struct ClassificationAm {
  ConfusionMatrix confusion;

  /// Per-class views mirroring the minimal F1 decomposition:
  /// mismatch term FP_j + FN_j, hit term TP_j, and the class weight TP_j + FN_j.
  std::int64_t f1_mismatch(int j) const { return confusion.fp(j) + confusion.fn(j); }
  std::int64_t f1_hits(int j) const { return confusion.tp(j); }
  std::int64_t class_weight(int j) const { return confusion.support(j); }

  bool operator==(const ClassificationAm&) const = default;
};

/// Regression measure: residual and deviation sums of squares plus the local
/// sample count. Additive as long as every participant used the same global
/// mean when forming deviation_sq_sum.
struct RegressionAm {
  double residual_sq_sum = 0.0;   // sum over (y_true - y_pred)^2
  double deviation_sq_sum = 0.0;  // sum over (y_true - global_mean)^2
  std::int64_t count = 0;

  bool operator==(const RegressionAm&) const = default;
};

using AggregatableMeasure = std::variant<ClassificationAm, RegressionAm>;

/// Additive (sum, count) pair; the global mean is sum/count over all
/// participants. Local means are not additive, these pieces are.
struct MeanStatistic {
  double sum = 0.0;
  std::int64_t count = 0;

  double mean() const {
    if (count == 0) throw UndefinedMetricError("mean undefined over zero samples");
    return sum / static_cast<double>(count);
  }
  MeanStatistic& operator+=(const MeanStatistic& other) {
    sum += other.sum;
    count += other.count;
    return *this;
  }
  bool operator==(const MeanStatistic&) const = default;
};

enum class StatisticId { global_mean };

std::string to_string(StatisticId id);
StatisticId statistic_id_from_string(const std::string& name);

/// Ordered pre-statistics a metric needs before measures can be computed.
/// Pure function of the spec: counts need nothing, r2 needs the global mean.
struct StatisticPlan {
  std::vector<StatisticId> phases;

  bool empty() const { return phases.empty(); }
  bool operator==(const StatisticPlan&) const = default;
};

StatisticPlan statistic_plan(const MetricSpec& spec);

ClassificationAm compute_classification_am(const LabeledPredictions& data);
RegressionAm compute_regression_am(const LabeledPredictions& data, double global_mean);

/// Local piece of the global-mean phase over a regression partition.
MeanStatistic compute_mean_statistic(const LabeledPredictions& data);

/// Componentwise sum. All measures must be the same variant and shape;
/// integer components are summed exactly, float components with compensated
/// summation, folded in input order.
AggregatableMeasure aggregate_ams(std::span<const AggregatableMeasure> measures);

/// Recombines an aggregated measure into the metric (mode flam):
/// classification delegates to the pooled confusion matrix, r2 evaluates
/// 1 - residual_sq_sum / deviation_sq_sum.
MetricValue metric_from_am(const AggregatableMeasure& am, const MetricSpec& spec);

/// End-to-end measure-based evaluation over in-memory partitions: runs the
/// statistic phases, computes per-partition measures, aggregates, and
/// recombines. Equals evaluate_centralized on the concatenation.
MetricValue flam_evaluate(std::span<const LabeledPredictions> partitions,
                          const MetricSpec& spec);

/// Multi-spec variant sharing one statistic phase and one measure per
/// partition across all specs.
std::vector<MetricValue> flam_evaluate(std::span<const LabeledPredictions> partitions,
                                       std::span<const MetricSpec> specs);

}  // namespace fedeval

#endif  // FEDEVAL_MEASURES_HPP
