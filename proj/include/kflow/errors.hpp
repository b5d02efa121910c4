#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kflow {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

class NonFiniteError : public Error {
 public:
  NonFiniteError(std::size_t index, double value);
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

/// Curvature not strictly positive at some sample.
class ConvexityError : public Error {
 public:
  ConvexityError(std::size_t index, double theta, double value);
  std::size_t index() const { return index_; }
  double theta() const { return theta_; }
  double value() const { return value_; }

 private:
  std::size_t index_;
  double theta_;
  double value_;
};

/// Curvature exceeded the representable or configured range.
class BlowUpError : public Error {
 public:
  explicit BlowUpError(double k_max);
  double k_max() const { return k_max_; }

 private:
  double k_max_;
};

/// Invalid configuration (scenario documents, step control, flow laws).
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace kflow
