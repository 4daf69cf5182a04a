#include "fedeval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fedeval/numeric.hpp"

namespace fedeval {

void MetricSpec::validate() const {
  const bool averaged = kind == MetricKind::precision || kind == MetricKind::recall ||
                        kind == MetricKind::f1;
  if (averaged && averaging == Averaging::none) {
    throw ValidationError(name() + " requires macro or weighted averaging");
  }
  if (!averaged && averaging != Averaging::none) {
    throw ValidationError("averaging does not apply to " + name());
  }
}

namespace {

std::string kind_token(MetricKind kind) {
  switch (kind) {
    case MetricKind::accuracy: return "accuracy";
    case MetricKind::precision: return "precision";
    case MetricKind::recall: return "recall";
    case MetricKind::f1: return "f1";
    case MetricKind::mcc: return "mcc";
    case MetricKind::r2: return "r2";
  }
  return "?";
}

}  // namespace

std::string MetricSpec::name() const {
  switch (averaging) {
    case Averaging::none: return kind_token(kind);
    case Averaging::macro: return kind_token(kind) + "-macro";
    case Averaging::weighted: return kind_token(kind) + "-weighted";
  }
  return kind_token(kind);
}

MetricSpec MetricSpec::accuracy() { return {MetricKind::accuracy, Averaging::none}; }
MetricSpec MetricSpec::precision(Averaging a) { return {MetricKind::precision, a}; }
MetricSpec MetricSpec::recall(Averaging a) { return {MetricKind::recall, a}; }
MetricSpec MetricSpec::f1(Averaging a) { return {MetricKind::f1, a}; }
MetricSpec MetricSpec::mcc() { return {MetricKind::mcc, Averaging::none}; }
MetricSpec MetricSpec::r2() { return {MetricKind::r2, Averaging::none}; }

MetricSpec parse_metric_spec(const std::string& token) {
  std::string kind = token;
  Averaging averaging = Averaging::none;
  if (auto pos = token.rfind("-macro"); pos != std::string::npos && pos == token.size() - 6) {
    kind = token.substr(0, pos);
    averaging = Averaging::macro;
  } else if (auto p = token.rfind("-weighted");
             p != std::string::npos && p == token.size() - 9) {
    kind = token.substr(0, p);
    averaging = Averaging::weighted;
  }
  MetricSpec spec;
  spec.averaging = averaging;
  if (kind == "accuracy") spec.kind = MetricKind::accuracy;
  else if (kind == "precision") spec.kind = MetricKind::precision;
  else if (kind == "recall") spec.kind = MetricKind::recall;
  else if (kind == "f1") spec.kind = MetricKind::f1;
  else if (kind == "mcc") spec.kind = MetricKind::mcc;
  else if (kind == "r2") spec.kind = MetricKind::r2;
  else throw ValidationError("unknown metric: " + token);
  spec.validate();
  return spec;
}

std::string to_string(EvalMode mode) {
  switch (mode) {
    case EvalMode::centralized: return "centralized";
    case EvalMode::weighted_average: return "weighted_average";
    case EvalMode::flam: return "flam";
  }
  return "?";
}

EvalMode eval_mode_from_string(const std::string& name) {
  if (name == "centralized") return EvalMode::centralized;
  if (name == "weighted_average") return EvalMode::weighted_average;
  if (name == "flam") return EvalMode::flam;
  throw ValidationError("unknown evaluation mode: " + name);
}

ConfusionMatrix confusion_from_labels(const LabeledPredictions& data) {
  const auto& d = data.classification();
  ConfusionMatrix cm(d.class_count);
  for (std::size_t i = 0; i < d.y_true.size(); ++i) {
    cm.add(d.y_true[i], d.y_pred[i]);
  }
  return cm;
}

namespace {

double ratio_or_policy(std::int64_t numerator, std::int64_t denominator, double policy) {
  if (denominator == 0) return policy;
  return static_cast<double>(numerator) / static_cast<double>(denominator);
}

double per_class_value(const ConfusionMatrix& cm, MetricKind kind, int j, double policy) {
  const std::int64_t tp = cm.tp(j);
  switch (kind) {
    case MetricKind::precision: return ratio_or_policy(tp, tp + cm.fp(j), policy);
    case MetricKind::recall: return ratio_or_policy(tp, tp + cm.fn(j), policy);
    case MetricKind::f1: return ratio_or_policy(2 * tp, 2 * tp + cm.fp(j) + cm.fn(j), policy);
    default: throw ValidationError("metric has no per-class form");
  }
}

double matthews(const ConfusionMatrix& cm) {
  const std::int64_t n = cm.total();
  std::int64_t trace = 0, pt = 0, pp = 0, tt = 0;
  for (int j = 0; j < cm.class_count(); ++j) {
    const std::int64_t t = cm.support(j);
    const std::int64_t p = cm.predicted(j);
    trace += cm.tp(j);
    pt += p * t;
    pp += p * p;
    tt += t * t;
  }
  const double d1 = static_cast<double>(n) * n - static_cast<double>(pp);
  const double d2 = static_cast<double>(n) * n - static_cast<double>(tt);
  if (d1 <= 0.0 || d2 <= 0.0) return 0.0;
  const double value =
      (static_cast<double>(n) * trace - static_cast<double>(pt)) / (std::sqrt(d1) * std::sqrt(d2));
  return std::clamp(value, -1.0, 1.0);
}

}  // namespace

MetricValue metric_from_confusion(const ConfusionMatrix& cm, const MetricSpec& spec) {
  spec.validate();
  if (spec.kind == MetricKind::r2) {
    throw ValidationError("r2 is not a confusion-matrix metric");
  }
  const std::int64_t n = cm.total();
  if (n == 0) throw UndefinedMetricError("metric undefined over zero samples");

  MetricValue result{spec, EvalMode::centralized, 0.0, n};
  if (spec.kind == MetricKind::accuracy) {
    std::int64_t trace = 0;
    for (int j = 0; j < cm.class_count(); ++j) trace += cm.tp(j);
    result.value = static_cast<double>(trace) / static_cast<double>(n);
    return result;
  }
  if (spec.kind == MetricKind::mcc) {
    result.value = matthews(cm);
    return result;
  }

  const int c = cm.class_count();
  if (spec.averaging == Averaging::macro) {
    // Averaged over all declared classes so local and pooled computations
    // share one denominator, even when a class is absent from the data.
    double sum = 0.0;
    for (int j = 0; j < c; ++j) sum += per_class_value(cm, spec.kind, j, spec.zero_division_value);
    result.value = sum / static_cast<double>(c);
  } else {
    double sum = 0.0;
    for (int j = 0; j < c; ++j) {
      const std::int64_t weight = cm.support(j);
      if (weight == 0) continue;
      sum += static_cast<double>(weight) * per_class_value(cm, spec.kind, j, spec.zero_division_value);
    }
    result.value = sum / static_cast<double>(n);
  }
  return result;
}

MetricValue evaluate_centralized(const LabeledPredictions& data, const MetricSpec& spec) {
  spec.validate();
  if (data.empty()) throw UndefinedMetricError("metric undefined over empty data");
  if (spec.task() != data.task()) {
    throw ValidationError(spec.name() + " does not apply to " + to_string(data.task()) +
                          " data");
  }
  if (data.task() == Task::classification) {
    return metric_from_confusion(confusion_from_labels(data), spec);
  }

  const auto& d = data.regression();
  CompensatedSum mean_sum;
  for (double y : d.y_true) mean_sum += y;
  const double mean = mean_sum.value() / static_cast<double>(d.y_true.size());

  CompensatedSum ss_res, ss_tot;
  for (std::size_t i = 0; i < d.y_true.size(); ++i) {
    const double r = d.y_true[i] - d.y_pred[i];
    const double t = d.y_true[i] - mean;
    ss_res += r * r;
    ss_tot += t * t;
  }
  if (ss_tot.value() == 0.0) {
    throw DegenerateVarianceError("r2 undefined: target has zero total variance");
  }
  return {spec, EvalMode::centralized, 1.0 - ss_res.value() / ss_tot.value(),
          static_cast<std::int64_t>(d.y_true.size())};
}

}  // namespace fedeval
