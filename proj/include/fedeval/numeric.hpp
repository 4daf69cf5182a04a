#ifndef FEDEVAL_NUMERIC_HPP
#define FEDEVAL_NUMERIC_HPP

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

namespace fedeval {

/// Kahan-style compensated accumulator. Keeps running error terms so that
/// long float sums stay accurate independent of magnitude spread.
class CompensatedSum {
 public:
  CompensatedSum() = default;
  explicit CompensatedSum(double initial) : sum_(initial) {}

  void add(double x) {
    const double y = x - compensation_;
    const double t = sum_ + y;
    compensation_ = (t - sum_) - y;
    sum_ = t;
  }

  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }

  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// Shortest decimal string that parses back to the identical double.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s, bool& ok) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  ok = res.ec == std::errc() && res.ptr == s.data() + s.size();
  return v;
}

}  // namespace fedeval

#endif  // FEDEVAL_NUMERIC_HPP
