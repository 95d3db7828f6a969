#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace phaseconv {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Operand shapes do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An argument lies outside the domain of the operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Multiplicative noise factor below -1.
class NoiseModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A metric was requested that is not defined (e.g. zero ground truth).
class UndefinedMetricError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed structured input. `where` names the offending field or line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(where) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

inline void require_dims(bool ok, const std::string& what) {
  if (!ok) throw DimensionError(what);
}

}  // namespace phaseconv
