#ifndef FEDEVAL_METRICS_HPP
#define FEDEVAL_METRICS_HPP

#include <cstdint>
#include <string>

#include "fedeval/confusion.hpp"
#include "fedeval/data.hpp"

namespace fedeval {

enum class MetricKind { accuracy, precision, recall, f1, mcc, r2 };
enum class Averaging { none, macro, weighted };

/// Identity of a metric: what to compute, how per-class values are averaged,
/// and which value a 0/0 per-class ratio takes. The zero-division value is
/// part of the identity because local and pooled computations must share it.
struct MetricSpec {
  MetricKind kind = MetricKind::accuracy;
  Averaging averaging = Averaging::none;
  double zero_division_value = 0.0;

  /// Throws ValidationError if kind and averaging do not fit together:
  /// accuracy/mcc/r2 take no averaging, precision/recall/f1 need macro or weighted.
  void validate() const;

  /// Task this spec applies to (r2 <-> regression, all others <-> classification).
  Task task() const { return kind == MetricKind::r2 ? Task::regression : Task::classification; }

  /// Canonical token, e.g. "accuracy", "f1-macro", "precision-weighted".
  std::string name() const;

  static MetricSpec accuracy();
  static MetricSpec precision(Averaging averaging);
  static MetricSpec recall(Averaging averaging);
  static MetricSpec f1(Averaging averaging);
  static MetricSpec mcc();
  static MetricSpec r2();

  bool operator==(const MetricSpec&) const = default;
};

/// Parses tokens produced by MetricSpec::name().
MetricSpec parse_metric_spec(const std::string& token);

enum class EvalMode { centralized, weighted_average, flam };

std::string to_string(EvalMode mode);
EvalMode eval_mode_from_string(const std::string& name);

struct MetricValue {
  MetricSpec spec;
  EvalMode mode = EvalMode::centralized;
  double value = 0.0;
  std::int64_t sample_count = 0;

  bool operator==(const MetricValue&) const = default;
};

/// Counts true/predicted pairs into a C x C table. The table total equals the
/// sample count; out-of-range labels are rejected with the offending index.
ConfusionMatrix confusion_from_labels(const LabeledPredictions& data);

/// Computes a classification metric from pooled count evidence.
///
/// accuracy    = sum_j TP_j / n
/// precision_j = TP_j / (TP_j + FP_j)
/// recall_j    = TP_j / (TP_j + FN_j)
/// f1_j        = 2 TP_j / (2 TP_j + FP_j + FN_j)
/// macro       = mean over all C declared classes (absent classes included)
/// weighted    = sum_j t_j m_j / n
/// mcc         = (n sum_j TP_j - sum_j p_j t_j)
///               / sqrt((n^2 - sum_j p_j^2)(n^2 - sum_j t_j^2)), 0 when the
///               denominator vanishes
///
/// Per-class 0/0 ratios take spec.zero_division_value.
MetricValue metric_from_confusion(const ConfusionMatrix& cm, const MetricSpec& spec);

/// Evaluates a metric over the full vector pair: the centralized oracle every
/// other evaluation mode is compared against.
MetricValue evaluate_centralized(const LabeledPredictions& data, const MetricSpec& spec);

}  // namespace fedeval

#endif  // FEDEVAL_METRICS_HPP
