#ifndef FEDEVAL_RNG_HPP
#define FEDEVAL_RNG_HPP

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace fedeval {

namespace detail {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}
}  // namespace detail

/// Counter-based generator: the output at position k is a pure function of
/// (key, k), so draws are reproducible regardless of iteration order and of
/// the standard library in use. Streams are keyed by a (seed, path...) tuple;
/// callers give each independent purpose (a class, a sample, a shuffle) its
/// own stream and let the counter advance within it.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    key_ = detail::mix64(seed + detail::kGolden);
    for (std::uint64_t p : path) {
      key_ = detail::mix64(key_ ^ (p + detail::kGolden));
    }
  }

  std::uint64_t next_u64() { return detail::mix64(key_ + (++counter_) * detail::kGolden); }

  /// Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform in (0, 1]; safe as a log() argument.
  double next_open_double() { return 1.0 - next_double(); }

  /// Unbiased uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  /// Standard normal via Box-Muller.
  double next_normal() {
    const double u1 = next_open_double();
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  /// Gamma(alpha, 1) via Marsaglia-Tsang, boosted for alpha < 1.
  double next_gamma(double alpha) {
    if (alpha < 1.0) {
      const double u = next_open_double();
      return next_gamma(alpha + 1.0) * std::pow(u, 1.0 / alpha);
    }
    const double d = alpha - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = next_normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      const double u = next_open_double();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  /// Symmetric Dirichlet(alpha) over `count` components.
  std::vector<double> next_dirichlet(double alpha, int count) {
    std::vector<double> draws(static_cast<std::size_t>(count));
    double total = 0.0;
    for (auto& g : draws) {
      g = next_gamma(alpha);
      total += g;
    }
    if (total <= 0.0) {
      // All gammas underflowed (extreme alpha); fall back to a point mass.
      draws.assign(draws.size(), 0.0);
      draws[next_below(draws.size())] = 1.0;
      return draws;
    }
    for (auto& g : draws) g /= total;
    return draws;
  }

  /// Index draw proportional to non-negative weights; weights need not sum to 1.
  int next_categorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = next_double() * total;
    int last_positive = 0;
    for (int i = 0; i < static_cast<int>(weights.size()); ++i) {
      if (weights[i] > 0.0) last_positive = i;
      u -= weights[i];
      // Strict inequality keeps the draw unbiased at cell boundaries.
      if (u < 0.0 && weights[i] > 0.0) return i;
    }
    return last_positive;
  }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace fedeval

#endif  // FEDEVAL_RNG_HPP
