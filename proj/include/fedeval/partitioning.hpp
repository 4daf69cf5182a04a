#ifndef FEDEVAL_PARTITIONING_HPP
#define FEDEVAL_PARTITIONING_HPP

#include <cstdint>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "fedeval/errors.hpp"

namespace fedeval {

/// Skew regimes: iid shuffle split, Dirichlet quantity skew (qs), Dirichlet
/// label skew (ls), combined skew (lqs), and the manual sole-owner skew (ms).
enum class SkewKind { iid, qs, ls, lqs, ms };

std::string to_string(SkewKind kind);
SkewKind skew_kind_from_string(const std::string& name);

struct SkewConfig {
  SkewKind kind = SkewKind::iid;
  double alpha_quantity = 0.0;  // qs/lqs
  double alpha_label = 0.0;     // ls/lqs
  int participants = 1;
  std::uint64_t seed = 0;

  /// Throws ValidationError when a required alpha is missing or not positive,
  /// naming the offending parameter.
  void validate() const;
};

/// Assignment of every pool index to exactly one participant.
struct PartitionPlan {
  int participants = 0;
  std::vector<int> assignment;  // pool index -> participant id

  /// Pool indices per participant, in pool order.
  std::vector<std::vector<std::size_t>> groups() const;

  bool operator==(const PartitionPlan&) const = default;
};

/// Splits the pool by the configured Dirichlet skew (iid/qs/ls/lqs).
///
/// ls draws, per class, participant proportions ~ Dirichlet(alpha_label) and
/// assigns that class's samples multinomially. qs draws partition sizes
/// ~ Dirichlet(alpha_quantity) over the shuffled pool. lqs fills qs sizes
/// with ls-style class draws: each sample is routed proportionally to its
/// class's participant proportion scaled by the participant's remaining
/// capacity. Deterministic given (labels, cfg); empty partitions are legal.
PartitionPlan dirichlet_partition(std::span<const int> labels, const SkewConfig& cfg);

/// Manual skew: dedicated classes (everything outside shared_classes) are
/// dealt round-robin by ascending class index, making every participant the
/// sole owner of at least one class; shared classes are split evenly.
PartitionPlan manual_skew_partition(std::span<const int> labels, int class_count,
                                    int participants, const std::set<int>& shared_classes,
                                    std::uint64_t seed);

void write_partition_csv(std::ostream& out, const PartitionPlan& plan);
PartitionPlan read_partition_csv(std::istream& in);

}  // namespace fedeval

#endif  // FEDEVAL_PARTITIONING_HPP
