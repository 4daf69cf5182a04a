#include "fedeval/experiment.hpp"

#include <algorithm>
#include <cmath>

#include "fedeval/rng.hpp"

namespace fedeval {

namespace {

enum : std::uint64_t { kPoolStream = 21, kModelStream = 22, kParticipantTag = 23 };

std::vector<int> synthesize_labels(const SyntheticConfig& cfg) {
  std::vector<int> labels(static_cast<std::size_t>(cfg.pool_size));
  CounterRng rng(cfg.skew.seed, {kPoolStream});
  for (auto& label : labels) {
    label = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(cfg.class_count)));
  }
  return labels;
}

std::vector<double> synthesize_targets(const SyntheticConfig& cfg) {
  std::vector<double> targets(static_cast<std::size_t>(cfg.pool_size));
  CounterRng rng(cfg.skew.seed, {kPoolStream});
  for (auto& y : targets) y = 10.0 * rng.next_double() + 2.0 * rng.next_normal();
  return targets;
}

// Quantile buckets over the targets act as pseudo-labels so every skew kind
// applies to regression pools as well.
std::vector<int> bucket_labels(const std::vector<double>& targets, int buckets) {
  std::vector<std::size_t> order(targets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return targets[a] < targets[b]; });
  std::vector<int> labels(targets.size());
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    labels[order[rank]] =
        static_cast<int>(rank * static_cast<std::size_t>(buckets) / targets.size());
  }
  return labels;
}

PartitionPlan make_plan(const std::vector<int>& labels, int class_count,
                        const SyntheticConfig& cfg) {
  if (cfg.skew.kind == SkewKind::ms) {
    std::set<int> shared = cfg.shared_classes;
    if (shared.empty() && class_count > cfg.skew.participants) {
      shared.insert(0);  // default: one overlapping class
    }
    return manual_skew_partition(labels, class_count, cfg.skew.participants, shared,
                                 cfg.skew.seed);
  }
  return dirichlet_partition(labels, cfg.skew);
}

double participant_accuracy(const SyntheticConfig& cfg, int participant) {
  if (!cfg.heterogeneous_models) return cfg.model_accuracy;
  CounterRng rng(cfg.skew.seed, {kModelStream, kParticipantTag,
                                 static_cast<std::uint64_t>(participant)});
  const double lo = std::max(0.05, cfg.model_accuracy - cfg.accuracy_spread);
  const double hi = std::min(0.99, cfg.model_accuracy + cfg.accuracy_spread);
  return lo + (hi - lo) * rng.next_double();
}

}  // namespace

std::vector<LabeledPredictions> build_synthetic_federation(const SyntheticConfig& cfg) {
  cfg.skew.validate();
  if (cfg.pool_size <= 0) throw ValidationError("pool_size must be positive");

  if (cfg.task == Task::classification) {
    const std::vector<int> labels = synthesize_labels(cfg);
    const PartitionPlan plan = make_plan(labels, cfg.class_count, cfg);
    const auto groups = plan.groups();

    std::vector<LabeledPredictions> partitions;
    partitions.reserve(groups.size());
    for (int p = 0; p < static_cast<int>(groups.size()); ++p) {
      ClassificationData data;
      data.class_count = cfg.class_count;
      for (std::size_t idx : groups[static_cast<std::size_t>(p)]) {
        data.y_true.push_back(labels[idx]);
      }
      const std::uint64_t model_seed =
          cfg.skew.seed * 1000003ULL + static_cast<std::uint64_t>(p);
      ConfusionKernel kernel =
          ConfusionKernel::diagonal(cfg.class_count, participant_accuracy(cfg, p), model_seed);
      if (cfg.heterogeneous_models) {
        std::set<int> local_classes(data.y_true.begin(), data.y_true.end());
        if (!local_classes.empty()) {
          kernel = ConfusionKernel::local_confusion(cfg.class_count,
                                                    participant_accuracy(cfg, p),
                                                    local_classes, model_seed);
        }
      }
      data.y_pred = predict_classification(data.y_true, kernel);
      partitions.emplace_back(std::move(data));
    }
    return partitions;
  }

  const std::vector<double> targets = synthesize_targets(cfg);
  const std::vector<int> labels = bucket_labels(targets, cfg.regression_buckets);
  const PartitionPlan plan = make_plan(labels, cfg.regression_buckets, cfg);
  const auto groups = plan.groups();

  std::vector<LabeledPredictions> partitions;
  partitions.reserve(groups.size());
  for (int p = 0; p < static_cast<int>(groups.size()); ++p) {
    RegressionData data;
    for (std::size_t idx : groups[static_cast<std::size_t>(p)]) {
      data.y_true.push_back(targets[idx]);
    }
    NoisyRegressor model;
    model.noise_sigma = cfg.regression_noise;
    model.seed = cfg.skew.seed * 1000033ULL + static_cast<std::uint64_t>(p);
    if (cfg.heterogeneous_models) {
      CounterRng rng(cfg.skew.seed, {kModelStream, kParticipantTag,
                                     static_cast<std::uint64_t>(p), 7});
      model.bias = cfg.regression_bias_spread * (2.0 * rng.next_double() - 1.0);
    }
    data.y_pred = predict_regression(data.y_true, model);
    partitions.emplace_back(std::move(data));
  }
  return partitions;
}

}  // namespace fedeval
