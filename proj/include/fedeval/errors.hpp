#ifndef FEDEVAL_ERRORS_HPP
#define FEDEVAL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fedeval {

/// Label or value outside the declared domain (e.g. class index >= C).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Metric requested over zero samples.
class UndefinedMetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// R2 requested while the target has zero total variance.
class DegenerateVarianceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched shapes or mixed measure variants during aggregation.
class ShapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or argument combination.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Partition request that cannot be satisfied (e.g. more participants than samples).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file; message carries the line number.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File system failure (missing file, unwritable path).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Wire protocol violation: bad frame, version mismatch, unexpected phase.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A peer did not respond within the configured deadline.
class TimeoutError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fedeval

#endif  // FEDEVAL_ERRORS_HPP
