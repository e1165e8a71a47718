#pragma once

#include <philap/boundary.hpp>
#include <philap/grid.hpp>
#include <philap/phi_map.hpp>

#include <functional>
#include <optional>
#include <string>

namespace philap {

/// F(t, u) with gradient in u; the Hessian is optional (central differences otherwise).
struct PotentialField {
  std::string name = "zero";
  std::function<double(double, const Vec&)> value;
  std::function<Vec(double, const Vec&)> gradient;
  std::function<Mat(double, const Vec&)> hessian;

  static PotentialField zero();

  double F(double t, const Vec& u) const { return value ? value(t, u) : 0.0; }
  Vec grad(double t, const Vec& u) const;
  Mat hess(double t, const Vec& u) const;
};

struct ProblemSpec {
  PhiMap phi;
  BoundaryFunctional boundary;
  PotentialField potential = PotentialField::zero();
  std::function<Vec(double)> h;  // empty means h = 0
  bool h_mean_zero = false;
  int N = 1;
  Grid grid;
  std::optional<Vec> periods;  // omega_i

  Vec h_at(double t) const { return h ? h(t) : Vec::Zero(N); }
  NodeMat h_samples() const;
  ProblemSpec with_grid(int M) const;
  /// Throws DomainError when F(., 0) != 0 or a declared mean-zero h is not.
  void validate(double tol = 1e-9) const;
};

}  // namespace philap
