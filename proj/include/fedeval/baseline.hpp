#ifndef FEDEVAL_BASELINE_HPP
#define FEDEVAL_BASELINE_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fedeval/measures.hpp"
#include "fedeval/metrics.hpp"

namespace fedeval {

/// How participant weights are chosen for weighted-average evaluation.
/// Weights are normalized to sum to 1 over the non-empty partitions.
enum class WeightScheme { sample_count, uniform };

std::string to_string(WeightScheme scheme);
WeightScheme weight_scheme_from_string(const std::string& name);

/// Per-partition metric values. Empty partitions are skipped and recorded,
/// not evaluated; each local value uses the federation-wide class set and
/// zero-division policy.
struct LocalEvaluation {
  std::vector<int> participants;    // indices of non-empty partitions, ascending
  std::vector<MetricValue> values;  // aligned with participants
  std::vector<int> skipped_empty;   // indices of empty partitions
};

LocalEvaluation local_metrics(std::span<const LabeledPredictions> partitions,
                              const MetricSpec& spec);

/// Weighted average of the local metric values.
MetricValue weighted_average_evaluate(std::span<const LabeledPredictions> partitions,
                                      const MetricSpec& spec, WeightScheme scheme);

/// One (metric, scheme) cell of a deviation report. Value fields stay empty
/// when a mode failed; the error string then names the failure.
struct DeviationCell {
  MetricSpec spec;
  WeightScheme scheme = WeightScheme::sample_count;
  std::optional<double> centralized;
  std::optional<double> weighted_average;
  std::optional<double> flam;
  std::optional<double> abs_dev_weighted;
  std::optional<double> abs_dev_flam;
  std::vector<double> local_values;  // aligned with DeviationReport::evaluated_participants
  std::string error;
};

struct DeviationReport {
  int participant_count = 0;
  std::int64_t sample_count = 0;
  std::vector<int> evaluated_participants;  // non-empty partitions
  std::vector<DeviationCell> cells;

  /// Largest measure-based deviation in the report; the runtime self-check
  /// treats anything above 1e-9 as an internal equivalence violation.
  double max_abs_dev_flam() const;
};

/// Runs all three evaluation modes per (spec, scheme) pair. Degenerate metrics
/// are recorded in the affected cell instead of aborting the report.
DeviationReport build_deviation_report(std::span<const LabeledPredictions> partitions,
                                       std::span<const MetricSpec> specs,
                                       std::span<const WeightScheme> schemes);

}  // namespace fedeval

#endif  // FEDEVAL_BASELINE_HPP
