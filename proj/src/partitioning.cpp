#include "fedeval/partitioning.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "fedeval/rng.hpp"

namespace fedeval {

std::string to_string(SkewKind kind) {
  switch (kind) {
    case SkewKind::iid: return "iid";
    case SkewKind::qs: return "qs";
    case SkewKind::ls: return "ls";
    case SkewKind::lqs: return "lqs";
    case SkewKind::ms: return "ms";
  }
  return "?";
}

SkewKind skew_kind_from_string(const std::string& name) {
  if (name == "iid") return SkewKind::iid;
  if (name == "qs") return SkewKind::qs;
  if (name == "ls") return SkewKind::ls;
  if (name == "lqs") return SkewKind::lqs;
  if (name == "ms") return SkewKind::ms;
  throw ValidationError("unknown skew kind: " + name);
}

void SkewConfig::validate() const {
  if (participants < 1) throw ValidationError("participants must be >= 1");
  const bool needs_quantity = kind == SkewKind::qs || kind == SkewKind::lqs;
  const bool needs_label = kind == SkewKind::ls || kind == SkewKind::lqs;
  if (needs_quantity && alpha_quantity <= 0.0) {
    throw ValidationError("alpha-quantity must be positive for " + to_string(kind));
  }
  if (needs_label && alpha_label <= 0.0) {
    throw ValidationError("alpha-label must be positive for " + to_string(kind));
  }
}

std::vector<std::vector<std::size_t>> PartitionPlan::groups() const {
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(participants));
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    out[static_cast<std::size_t>(assignment[i])].push_back(i);
  }
  return out;
}

namespace {

// Stream tags keep independent purposes on independent RNG streams.
enum : std::uint64_t { kShuffleStream = 1, kSizeStream = 2, kClassStream = 3 };

std::vector<std::size_t> shuffled_pool(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  CounterRng rng(seed, {kShuffleStream});
  for (std::size_t i = n; i > 1; --i) {
    std::swap(idx[i - 1], idx[rng.next_below(i)]);
  }
  return idx;
}

// Apportions n slots proportionally to the weights, exactly: floor first,
// then the largest fractional remainders take the leftover slots.
std::vector<std::size_t> apportion(const std::vector<double>& weights, std::size_t n) {
  const std::size_t p = weights.size();
  std::vector<std::size_t> sizes(p, 0);
  std::vector<std::pair<double, std::size_t>> remainders(p);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < p; ++i) {
    const double share = weights[i] * static_cast<double>(n);
    sizes[i] = static_cast<std::size_t>(share);
    assigned += sizes[i];
    remainders[i] = {share - static_cast<double>(sizes[i]), i};
  }
  std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) {
    sizes[remainders[k % p].second] += 1;
  }
  return sizes;
}

PartitionPlan assign_chunks(const std::vector<std::size_t>& pool,
                            const std::vector<std::size_t>& sizes, int participants) {
  PartitionPlan plan;
  plan.participants = participants;
  plan.assignment.assign(pool.size(), 0);
  std::size_t cursor = 0;
  for (int p = 0; p < participants; ++p) {
    for (std::size_t k = 0; k < sizes[static_cast<std::size_t>(p)]; ++k) {
      plan.assignment[pool[cursor++]] = p;
    }
  }
  return plan;
}

// Per-class participant proportions, one Dirichlet draw per class on its own
// stream so the draw order cannot depend on pool iteration.
std::vector<std::vector<double>> class_proportions(int class_count, int participants,
                                                   double alpha, std::uint64_t seed) {
  std::vector<std::vector<double>> props(static_cast<std::size_t>(class_count));
  for (int j = 0; j < class_count; ++j) {
    CounterRng rng(seed, {kClassStream, static_cast<std::uint64_t>(j)});
    props[static_cast<std::size_t>(j)] = rng.next_dirichlet(alpha, participants);
  }
  return props;
}

int infer_class_count(std::span<const int> labels) {
  int max_label = -1;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) {
      throw DomainError("negative label at index " + std::to_string(i));
    }
    max_label = std::max(max_label, labels[i]);
  }
  return max_label + 1;
}

}  // namespace

PartitionPlan dirichlet_partition(std::span<const int> labels, const SkewConfig& cfg) {
  cfg.validate();
  if (cfg.kind == SkewKind::ms) {
    throw ValidationError("manual skew uses manual_skew_partition");
  }
  const std::size_t n = labels.size();
  if (n == 0) throw InfeasibleError("cannot partition an empty pool");
  if (static_cast<std::size_t>(cfg.participants) > n) {
    throw InfeasibleError("more participants (" + std::to_string(cfg.participants) +
                          ") than pool samples (" + std::to_string(n) + ")");
  }
  const int p = cfg.participants;

  if (cfg.kind == SkewKind::iid) {
    const std::vector<double> uniform(static_cast<std::size_t>(p), 1.0 / p);
    return assign_chunks(shuffled_pool(n, cfg.seed), apportion(uniform, n), p);
  }

  if (cfg.kind == SkewKind::qs) {
    CounterRng rng(cfg.seed, {kSizeStream});
    const auto weights = rng.next_dirichlet(cfg.alpha_quantity, p);
    return assign_chunks(shuffled_pool(n, cfg.seed), apportion(weights, n), p);
  }

  const int class_count = infer_class_count(labels);
  const auto props = class_proportions(class_count, p, cfg.alpha_label, cfg.seed);

  PartitionPlan plan;
  plan.participants = p;
  plan.assignment.assign(n, 0);

  if (cfg.kind == SkewKind::ls) {
    std::vector<CounterRng> draw_streams;
    draw_streams.reserve(static_cast<std::size_t>(class_count));
    for (int j = 0; j < class_count; ++j) {
      draw_streams.emplace_back(cfg.seed, std::initializer_list<std::uint64_t>{
                                              kClassStream, static_cast<std::uint64_t>(j), 1});
    }
    for (std::size_t i = 0; i < n; ++i) {
      const int j = labels[i];
      plan.assignment[i] =
          draw_streams[static_cast<std::size_t>(j)].next_categorical(props[static_cast<std::size_t>(j)]);
    }
    return plan;
  }

  // lqs: quantity draw fixes the partition sizes, label draws decide which
  // participant takes each sample, scaled by remaining capacity.
  CounterRng size_rng(cfg.seed, {kSizeStream});
  const auto sizes = apportion(size_rng.next_dirichlet(cfg.alpha_quantity, p), n);
  std::vector<double> remaining(sizes.begin(), sizes.end());

  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(class_count));
  for (std::size_t i = 0; i < n; ++i) by_class[static_cast<std::size_t>(labels[i])].push_back(i);

  std::vector<double> weights(static_cast<std::size_t>(p));
  for (int j = 0; j < class_count; ++j) {
    CounterRng rng(cfg.seed, {kClassStream, static_cast<std::uint64_t>(j), 1});
    for (std::size_t i : by_class[static_cast<std::size_t>(j)]) {
      double total = 0.0;
      for (int q = 0; q < p; ++q) {
        weights[static_cast<std::size_t>(q)] =
            props[static_cast<std::size_t>(j)][static_cast<std::size_t>(q)] *
            remaining[static_cast<std::size_t>(q)];
        total += weights[static_cast<std::size_t>(q)];
      }
      if (total <= 0.0) {
        // Label draw put no mass where capacity is left; fall back to capacity.
        for (int q = 0; q < p; ++q) weights[static_cast<std::size_t>(q)] = remaining[static_cast<std::size_t>(q)];
      }
      const int chosen = rng.next_categorical(weights);
      plan.assignment[i] = chosen;
      remaining[static_cast<std::size_t>(chosen)] -= 1.0;
    }
  }
  return plan;
}

PartitionPlan manual_skew_partition(std::span<const int> labels, int class_count,
                                    int participants, const std::set<int>& shared_classes,
                                    std::uint64_t seed) {
  if (participants < 1) throw ValidationError("participants must be >= 1");
  if (class_count < 1) throw ValidationError("class_count must be >= 1");
  for (int c : shared_classes) {
    if (c < 0 || c >= class_count) {
      throw DomainError("shared class " + std::to_string(c) + " outside [0, " +
                        std::to_string(class_count) + ")");
    }
  }
  const int dedicated = class_count - static_cast<int>(shared_classes.size());
  if (dedicated < participants) {
    throw InfeasibleError("need at least " +
                          std::to_string(participants + static_cast<int>(shared_classes.size())) +
                          " classes for " + std::to_string(participants) +
                          " participants, have " + std::to_string(class_count));
  }

  // Owner per dedicated class, round-robin by ascending class index.
  std::vector<int> owner(static_cast<std::size_t>(class_count), -1);
  int next_owner = 0;
  for (int c = 0; c < class_count; ++c) {
    if (shared_classes.count(c) != 0) continue;
    owner[static_cast<std::size_t>(c)] = next_owner;
    next_owner = (next_owner + 1) % participants;
  }

  PartitionPlan plan;
  plan.participants = participants;
  plan.assignment.assign(labels.size(), 0);

  std::vector<std::vector<std::size_t>> shared_members(static_cast<std::size_t>(class_count));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int label = labels[i];
    if (label < 0 || label >= class_count) {
      throw DomainError("label " + std::to_string(label) + " at index " + std::to_string(i) +
                        " outside [0, " + std::to_string(class_count) + ")");
    }
    if (owner[static_cast<std::size_t>(label)] >= 0) {
      plan.assignment[i] = owner[static_cast<std::size_t>(label)];
    } else {
      shared_members[static_cast<std::size_t>(label)].push_back(i);
    }
  }

  // Shared classes: shuffle the class members, then deal round-robin so the
  // split is even to within one sample.
  for (int c : shared_classes) {
    auto& members = shared_members[static_cast<std::size_t>(c)];
    CounterRng rng(seed, {kClassStream, static_cast<std::uint64_t>(c)});
    for (std::size_t i = members.size(); i > 1; --i) {
      std::swap(members[i - 1], members[rng.next_below(i)]);
    }
    for (std::size_t k = 0; k < members.size(); ++k) {
      plan.assignment[members[k]] = static_cast<int>(k % static_cast<std::size_t>(participants));
    }
  }
  return plan;
}

void write_partition_csv(std::ostream& out, const PartitionPlan& plan) {
  out << "pool_index,participant_id\n";
  for (std::size_t i = 0; i < plan.assignment.size(); ++i) {
    out << i << ',' << plan.assignment[i] << '\n';
  }
}

PartitionPlan read_partition_csv(std::istream& in) {
  PartitionPlan plan;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1 && line == "pool_index,participant_id") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": expected pool_index,participant_id");
    }
    std::size_t index = 0;
    int participant = 0;
    try {
      index = static_cast<std::size_t>(std::stoull(line.substr(0, comma)));
      participant = std::stoi(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw ParseError("line " + std::to_string(line_no) + ": malformed integer");
    }
    if (index >= plan.assignment.size()) plan.assignment.resize(index + 1, -1);
    plan.assignment[index] = participant;
    plan.participants = std::max(plan.participants, participant + 1);
  }
  for (std::size_t i = 0; i < plan.assignment.size(); ++i) {
    if (plan.assignment[i] < 0) {
      throw ParseError("pool index " + std::to_string(i) + " missing from plan");
    }
  }
  return plan;
}

}  // namespace fedeval
