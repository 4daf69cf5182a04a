#include "fedeval/baseline.hpp"

#include <algorithm>
#include <cmath>

namespace fedeval {

std::string to_string(WeightScheme scheme) {
  return scheme == WeightScheme::sample_count ? "sample-count" : "uniform";
}

WeightScheme weight_scheme_from_string(const std::string& name) {
  if (name == "sample-count" || name == "sample_count") return WeightScheme::sample_count;
  if (name == "uniform") return WeightScheme::uniform;
  throw ValidationError("unknown weight scheme: " + name);
}

LocalEvaluation local_metrics(std::span<const LabeledPredictions> partitions,
                              const MetricSpec& spec) {
  validate_federation(partitions);
  LocalEvaluation result;
  for (int i = 0; i < static_cast<int>(partitions.size()); ++i) {
    if (partitions[i].empty()) {
      result.skipped_empty.push_back(i);
      continue;
    }
    result.participants.push_back(i);
    result.values.push_back(evaluate_centralized(partitions[i], spec));
  }
  return result;
}

MetricValue weighted_average_evaluate(std::span<const LabeledPredictions> partitions,
                                      const MetricSpec& spec, WeightScheme scheme) {
  const LocalEvaluation locals = local_metrics(partitions, spec);
  if (locals.values.empty()) {
    throw UndefinedMetricError("weighted average undefined: all partitions are empty");
  }
  std::int64_t total = 0;
  for (const auto& v : locals.values) total += v.sample_count;

  double weighted = 0.0;
  for (std::size_t i = 0; i < locals.values.size(); ++i) {
    const double weight =
        scheme == WeightScheme::sample_count
            ? static_cast<double>(locals.values[i].sample_count) / static_cast<double>(total)
            : 1.0 / static_cast<double>(locals.values.size());
    weighted += weight * locals.values[i].value;
  }
  return {spec, EvalMode::weighted_average, weighted, total};
}

double DeviationReport::max_abs_dev_flam() const {
  double max_dev = 0.0;
  for (const auto& cell : cells) {
    if (cell.abs_dev_flam) max_dev = std::max(max_dev, *cell.abs_dev_flam);
  }
  return max_dev;
}

DeviationReport build_deviation_report(std::span<const LabeledPredictions> partitions,
                                       std::span<const MetricSpec> specs,
                                       std::span<const WeightScheme> schemes) {
  validate_federation(partitions);
  DeviationReport report;
  report.participant_count = static_cast<int>(partitions.size());
  for (const auto& p : partitions) {
    report.sample_count += static_cast<std::int64_t>(p.size());
  }
  for (int i = 0; i < static_cast<int>(partitions.size()); ++i) {
    if (!partitions[i].empty()) report.evaluated_participants.push_back(i);
  }

  const LabeledPredictions pooled = concat(partitions);
  for (const auto& spec : specs) {
    std::optional<double> centralized, flam;
    std::string spec_error;
    try {
      centralized = evaluate_centralized(pooled, spec).value;
      flam = flam_evaluate(partitions, spec).value;
    } catch (const std::runtime_error& e) {
      spec_error = e.what();
    }

    for (const WeightScheme scheme : schemes) {
      DeviationCell cell;
      cell.spec = spec;
      cell.scheme = scheme;
      cell.centralized = centralized;
      cell.flam = flam;
      cell.error = spec_error;
      try {
        const LocalEvaluation locals = local_metrics(partitions, spec);
        for (const auto& v : locals.values) cell.local_values.push_back(v.value);
        cell.weighted_average = weighted_average_evaluate(partitions, spec, scheme).value;
      } catch (const std::runtime_error& e) {
        if (cell.error.empty()) cell.error = e.what();
      }
      if (cell.centralized && cell.weighted_average) {
        cell.abs_dev_weighted = std::abs(*cell.weighted_average - *cell.centralized);
      }
      if (cell.centralized && cell.flam) {
        cell.abs_dev_flam = std::abs(*cell.flam - *cell.centralized);
      }
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

}  // namespace fedeval
