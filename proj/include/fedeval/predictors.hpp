#ifndef FEDEVAL_PREDICTORS_HPP
#define FEDEVAL_PREDICTORS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "fedeval/data.hpp"

namespace fedeval {

/// Row-stochastic C x C matrix standing in for a trained classifier: row j
/// gives the prediction distribution for samples whose true class is j.
struct ConfusionKernel {
  int class_count = 0;
  std::vector<double> rows;  // row-major, C x C
  std::uint64_t seed = 0;

  double at(int true_class, int predicted_class) const {
    return rows[static_cast<std::size_t>(true_class) * class_count + predicted_class];
  }

  /// Throws ValidationError unless every row is a probability vector
  /// (entries >= 0, sum within 1e-9 of 1).
  void validate() const;

  static ConfusionKernel identity(int class_count, std::uint64_t seed = 0);
  static ConfusionKernel uniform(int class_count, std::uint64_t seed = 0);
  /// `diagonal` mass on the true class, remainder spread over the other classes.
  static ConfusionKernel diagonal(int class_count, double diagonal, std::uint64_t seed = 0);
  /// `diagonal` mass on the true class, remainder spread over `confused_with`
  /// only; mimics a model that mixes up the classes one participant holds.
  static ConfusionKernel local_confusion(int class_count, double diagonal,
                                         const std::set<int>& confused_with,
                                         std::uint64_t seed = 0);
};

/// Samples y_pred[i] from the kernel row of y_true[i]. Each sample draws from
/// its own seeded stream, so results do not depend on evaluation order.
std::vector<int> predict_classification(std::span<const int> labels,
                                        const ConfusionKernel& kernel);

/// Additive-noise stand-in for a trained regressor.
struct NoisyRegressor {
  double bias = 0.0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// y_pred[i] = y_true[i] + bias + N(0, sigma), deterministic per (seed, i).
std::vector<double> predict_regression(std::span<const double> y_true,
                                       const NoisyRegressor& model);

/// A federation loaded from or written to a prediction file; partitions are
/// ordered by ascending participant id.
struct Federation {
  std::vector<int> participant_ids;
  std::vector<LabeledPredictions> partitions;
};

/// Reads a prediction CSV (`participant_id,y_true,y_pred`, header optional).
/// Classification labels must be integers; the class count is taken from
/// `class_count` when given, otherwise inferred as max label + 1.
Federation ingest_predictions(const std::string& path, Task task,
                              std::optional<int> class_count = std::nullopt);
Federation ingest_predictions(std::istream& in, Task task,
                              std::optional<int> class_count = std::nullopt);

void emit_predictions(std::ostream& out, const Federation& federation);
void emit_predictions(const std::string& path, const Federation& federation);

}  // namespace fedeval

#endif  // FEDEVAL_PREDICTORS_HPP
