// Brute-force reference computations for the tests. Deliberately independent
// of the library's confusion-matrix path: per-class counts come from direct
// vector scans, averaged metrics are assembled from those, and MCC uses the
// covariance form over one-hot indicator vectors instead of the count formula.
#ifndef FEDEVAL_TESTS_ORACLE_HPP
#define FEDEVAL_TESTS_ORACLE_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "fedeval/data.hpp"

namespace oracle {

inline std::int64_t count_pairs(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                                int true_class, int predicted_class) {
  std::int64_t n = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] == true_class && y_pred[i] == predicted_class) ++n;
  }
  return n;
}

inline double accuracy(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
  std::int64_t correct = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] == y_pred[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(y_true.size());
}

struct ClassCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t support = 0;
};

inline ClassCounts class_counts(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                                int j) {
  ClassCounts c;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const bool is_true = y_true[i] == j;
    const bool is_pred = y_pred[i] == j;
    if (is_true) ++c.support;
    if (is_true && is_pred) ++c.tp;
    if (!is_true && is_pred) ++c.fp;
    if (is_true && !is_pred) ++c.fn;
  }
  return c;
}

enum class PerClass { precision, recall, f1 };

inline double per_class(const ClassCounts& c, PerClass kind, double zero_division) {
  auto ratio = [&](std::int64_t num, std::int64_t den) {
    return den == 0 ? zero_division : static_cast<double>(num) / static_cast<double>(den);
  };
  switch (kind) {
    case PerClass::precision: return ratio(c.tp, c.tp + c.fp);
    case PerClass::recall: return ratio(c.tp, c.tp + c.fn);
    case PerClass::f1: return ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn);
  }
  return 0.0;
}

inline double macro(const std::vector<int>& y_true, const std::vector<int>& y_pred, int classes,
                    PerClass kind, double zero_division = 0.0) {
  double sum = 0.0;
  for (int j = 0; j < classes; ++j) {
    sum += per_class(class_counts(y_true, y_pred, j), kind, zero_division);
  }
  return sum / classes;
}

inline double weighted(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                       int classes, PerClass kind, double zero_division = 0.0) {
  double sum = 0.0;
  for (int j = 0; j < classes; ++j) {
    const ClassCounts c = class_counts(y_true, y_pred, j);
    sum += static_cast<double>(c.support) * per_class(c, kind, zero_division);
  }
  return sum / static_cast<double>(y_true.size());
}

// Correlation between the one-hot encodings of truth and prediction, summed
// over classes; algebraically equal to the multiclass count formula but
// computed along a different route.
inline double mcc_covariance(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                             int classes) {
  const double n = static_cast<double>(y_true.size());
  double cov_xy = 0.0, cov_xx = 0.0, cov_yy = 0.0;
  for (int k = 0; k < classes; ++k) {
    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
      mean_x += y_true[i] == k ? 1.0 : 0.0;
      mean_y += y_pred[i] == k ? 1.0 : 0.0;
    }
    mean_x /= n;
    mean_y /= n;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
      const double x = (y_true[i] == k ? 1.0 : 0.0) - mean_x;
      const double y = (y_pred[i] == k ? 1.0 : 0.0) - mean_y;
      cov_xy += x * y;
      cov_xx += x * x;
      cov_yy += y * y;
    }
  }
  if (cov_xx == 0.0 || cov_yy == 0.0) return 0.0;
  return cov_xy / std::sqrt(cov_xx * cov_yy);
}

inline double r2(const std::vector<double>& y_true, const std::vector<double>& y_pred) {
  double mean = 0.0;
  for (double y : y_true) mean += y;
  mean /= static_cast<double>(y_true.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    ss_res += (y_true[i] - y_pred[i]) * (y_true[i] - y_pred[i]);
    ss_tot += (y_true[i] - mean) * (y_true[i] - mean);
  }
  return 1.0 - ss_res / ss_tot;
}

}  // namespace oracle

namespace fixtures {

inline fedeval::LabeledPredictions cls(std::vector<int> y_true, std::vector<int> y_pred,
                                       int classes) {
  return fedeval::LabeledPredictions(
      fedeval::ClassificationData{classes, std::move(y_true), std::move(y_pred)});
}

inline fedeval::LabeledPredictions reg(std::vector<double> y_true, std::vector<double> y_pred) {
  return fedeval::LabeledPredictions(
      fedeval::RegressionData{std::move(y_true), std::move(y_pred)});
}

// Two-participant running example: pooled confusion [[3,1],[0,2]].
inline std::vector<fedeval::LabeledPredictions> running_classification() {
  std::vector<fedeval::LabeledPredictions> parts;
  parts.push_back(cls({0, 0, 0, 0}, {0, 0, 0, 1}, 2));
  parts.push_back(cls({1, 1}, {1, 1}, 2));
  return parts;
}

// Two-participant regression example with pooled r2 = 0.6.
inline std::vector<fedeval::LabeledPredictions> running_regression() {
  std::vector<fedeval::LabeledPredictions> parts;
  parts.push_back(reg({1.0, 2.0}, {1.0, 2.0}));
  parts.push_back(reg({3.0, 4.0}, {4.0, 3.0}));
  return parts;
}

// Random classification federation; plain mt19937 is fine test-side.
inline std::vector<fedeval::LabeledPredictions> random_classification(std::mt19937_64& rng,
                                                                      int max_participants = 6,
                                                                      int max_classes = 8,
                                                                      int max_samples = 200) {
  std::uniform_int_distribution<int> p_dist(1, max_participants);
  std::uniform_int_distribution<int> c_dist(2, max_classes);
  const int participants = p_dist(rng);
  const int classes = c_dist(rng);
  std::uniform_int_distribution<int> n_dist(0, max_samples);
  std::uniform_int_distribution<int> label(0, classes - 1);
  std::vector<fedeval::LabeledPredictions> parts;
  bool any = false;
  for (int p = 0; p < participants; ++p) {
    const int n = n_dist(rng);
    std::vector<int> y_true(static_cast<std::size_t>(n)), y_pred(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      y_true[static_cast<std::size_t>(i)] = label(rng);
      // Skewed predictions: half the time correct, otherwise arbitrary.
      y_pred[static_cast<std::size_t>(i)] =
          (rng() & 1) ? y_true[static_cast<std::size_t>(i)] : label(rng);
    }
    any = any || n > 0;
    parts.push_back(cls(std::move(y_true), std::move(y_pred), classes));
  }
  if (!any) {
    parts[0] = cls({0}, {std::min(1, classes - 1)}, classes);
  }
  return parts;
}

inline std::vector<fedeval::LabeledPredictions> random_regression(std::mt19937_64& rng,
                                                                  int max_participants = 6,
                                                                  int max_samples = 200) {
  std::uniform_int_distribution<int> p_dist(1, max_participants);
  const int participants = p_dist(rng);
  std::uniform_int_distribution<int> n_dist(0, max_samples);
  std::normal_distribution<double> value(0.0, 5.0);
  std::normal_distribution<double> noise(0.3, 1.0);
  std::vector<fedeval::LabeledPredictions> parts;
  std::size_t total = 0;
  for (int p = 0; p < participants; ++p) {
    const int n = n_dist(rng);
    std::vector<double> y_true(static_cast<std::size_t>(n)), y_pred(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      y_true[static_cast<std::size_t>(i)] = value(rng);
      y_pred[static_cast<std::size_t>(i)] = y_true[static_cast<std::size_t>(i)] + noise(rng);
    }
    total += static_cast<std::size_t>(n);
    parts.push_back(reg(std::move(y_true), std::move(y_pred)));
  }
  if (total < 2) {
    parts[0] = reg({1.0, 2.0, 4.0}, {1.5, 2.5, 3.0});
  }
  return parts;
}

}  // namespace fixtures

#endif  // FEDEVAL_TESTS_ORACLE_HPP
