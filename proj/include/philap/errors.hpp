#pragma once

#include <stdexcept>
#include <string>

namespace philap {

/// Argument outside the domain of an operation (e.g. |y| >= a for phi).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative method hit its iteration cap or stalled.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The operation has no analytic answer for this variant.
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Endpoint data violate |y - x| < T a; carries the gap |y - x| - T a.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, double gap)
      : std::runtime_error(what), gap_(gap) {}
  double gap() const noexcept { return gap_; }

 private:
  double gap_;
};

}  // namespace philap
