#ifndef FEDEVAL_CONFUSION_HPP
#define FEDEVAL_CONFUSION_HPP

#include <cstdint>
#include <vector>

#include "fedeval/errors.hpp"

namespace fedeval {

/// C x C count table, rows indexed by true class, columns by predicted class.
/// Additive across disjoint datasets, which makes it the universal
/// classification measure exchanged by the protocol.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int class_count)
      : class_count_(class_count),
        counts_(static_cast<std::size_t>(class_count) * class_count, 0) {
    if (class_count <= 0) throw ValidationError("confusion matrix needs class_count >= 1");
  }

  int class_count() const { return class_count_; }

  std::int64_t at(int true_class, int predicted_class) const {
    return counts_[index(true_class, predicted_class)];
  }
  void add(int true_class, int predicted_class, std::int64_t count = 1) {
    counts_[index(true_class, predicted_class)] += count;
  }

  std::int64_t tp(int j) const { return at(j, j); }
  std::int64_t fn(int j) const { return row_sum(j) - at(j, j); }
  std::int64_t fp(int j) const { return col_sum(j) - at(j, j); }
  std::int64_t tn(int j) const { return total() - tp(j) - fp(j) - fn(j); }

  /// Samples whose true class is j (t_j).
  std::int64_t support(int j) const { return row_sum(j); }
  /// Samples predicted as class j (p_j).
  std::int64_t predicted(int j) const { return col_sum(j); }

  std::int64_t total() const {
    std::int64_t n = 0;
    for (std::int64_t c : counts_) n += c;
    return n;
  }

  ConfusionMatrix& operator+=(const ConfusionMatrix& other) {
    if (other.class_count_ != class_count_) {
      throw ShapeError("confusion matrix class counts differ: " +
                       std::to_string(class_count_) + " vs " +
                       std::to_string(other.class_count_));
    }
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    return *this;
  }

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::size_t index(int t, int p) const {
    if (t < 0 || t >= class_count_ || p < 0 || p >= class_count_) {
      throw DomainError("confusion matrix index (" + std::to_string(t) + ", " +
                        std::to_string(p) + ") outside [0, " + std::to_string(class_count_) +
                        ")");
    }
    return static_cast<std::size_t>(t) * class_count_ + p;
  }
  std::int64_t row_sum(int j) const {
    std::int64_t s = 0;
    for (int k = 0; k < class_count_; ++k) s += at(j, k);
    return s;
  }
  std::int64_t col_sum(int j) const {
    std::int64_t s = 0;
    for (int k = 0; k < class_count_; ++k) s += at(k, j);
    return s;
  }

  int class_count_;
  std::vector<std::int64_t> counts_;
};

}  // namespace fedeval

#endif  // FEDEVAL_CONFUSION_HPP
