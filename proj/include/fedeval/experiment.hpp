#ifndef FEDEVAL_EXPERIMENT_HPP
#define FEDEVAL_EXPERIMENT_HPP

#include <cstdint>
#include <set>
#include <vector>

#include "fedeval/data.hpp"
#include "fedeval/partitioning.hpp"
#include "fedeval/predictors.hpp"

namespace fedeval {

/// Synthetic federation recipe: a labeled pool, a skew, and per-participant
/// stand-in models. Fully determined by the seed.
struct SyntheticConfig {
  Task task = Task::classification;
  int class_count = 10;
  int pool_size = 2000;
  SkewConfig skew;                     // participants/seed live here
  std::set<int> shared_classes;       // ms only
  double model_accuracy = 0.9;        // kernel diagonal mass
  /// Per-participant models: accuracy varies across participants and each
  /// kernel confuses only the classes the participant holds. This is what
  /// makes local metrics spread apart under skew.
  bool heterogeneous_models = false;
  double accuracy_spread = 0.3;       // heterogeneous range half-width
  double regression_noise = 0.5;      // regressor sigma
  double regression_bias_spread = 2.0;  // heterogeneous per-participant bias range

  /// Regression pools are bucketed into this many quantile classes so label
  /// and manual skews apply to regression federations too.
  int regression_buckets = 8;
};

/// Builds the pool, partitions it, and runs the per-participant stand-in
/// models. Deterministic given the config.
std::vector<LabeledPredictions> build_synthetic_federation(const SyntheticConfig& cfg);

}  // namespace fedeval

#endif  // FEDEVAL_EXPERIMENT_HPP
