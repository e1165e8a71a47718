#pragma once

// Singular phi-Laplacian generators: phi maps the open ball B_a onto R^N,
// phi = grad Phi with Phi <= 0 continuous and strictly convex on the closed ball.

#include <philap/types.hpp>

#include <cstdint>
#include <functional>
#include <memory>
#include <span>

namespace philap {

enum class PhiKind { Relativistic, PRelativistic, Custom };

/// User-supplied generator. `inverse` may be left empty; a radial root
/// solve along z/|z| is used instead.
struct CustomPhi {
  std::function<Vec(const Vec&)> phi;
  std::function<Vec(const Vec&)> inverse;
  std::function<double(const Vec&)> potential;
};

/// Immutable after construction; safe to share between threads.
class PhiMap {
 public:
  /// phi(y) = (y/a) / sqrt(1 - |y/a|^2), Phi(y) = -a sqrt(1 - |y/a|^2).
  static PhiMap relativistic(double a = 1.0);
  /// Radial profile r^{p-1} / (1 - r^p)^{1-1/p} in the scaled variable r = |y|/a.
  static PhiMap p_relativistic(double p, double a = 1.0);
  static PhiMap custom(double a, CustomPhi fns);
  /// Relativistic with a = 1.
  PhiMap() = default;

  PhiKind kind() const { return kind_; }
  double radius() const { return a_; }
  double p() const { return p_; }
  /// Cached Phi(0).
  double phi0_value() const { return phi0_; }

  Vec phi(const Vec& y) const;
  Vec inverse(const Vec& z) const;
  double potential(const Vec& y) const;
  /// Jacobian of phi (the Hessian of Phi), N x N.
  Mat jacobian(const Vec& y) const;

  // Allocation-free variants used by the grid kernels. `jac` is N*N, column-major.
  void phi(std::span<const double> y, std::span<double> out) const;
  double potential(std::span<const double> y) const;
  void jacobian(std::span<const double> y, std::span<double> jac) const;

  /// Minimum of Phi over the closed ball, located by radial sampling.
  double min_potential(int dim) const;

 private:
  bool radial() const { return kind_ != PhiKind::Custom; }
  // Radial profiles in the unscaled variable r in [0, 1).
  double profile(double r) const;
  double profile_derivative(double r) const;
  double profile_potential(double r) const;
  double profile_inverse(double zeta) const;
  Vec custom_inverse(const Vec& z) const;

  PhiKind kind_ = PhiKind::Relativistic;
  double a_ = 1.0;
  double p_ = 2.0;
  double phi0_ = -1.0;
  std::shared_ptr<const CustomPhi> custom_;
};

/// Worst observed violation of each generator property over deterministic samples.
struct HypothesisDiagnostics {
  double phi_at_zero = 0.0;      // |phi(0)|
  double monotonicity = 0.0;     // max(0, -<phi(y1)-phi(y2) | y1-y2>)
  double inverse_range = 0.0;    // max(0, |phi^{-1}(z)| - a), +inf on failure
  double round_trip = 0.0;       // |phi(phi^{-1}(z)) - z| / (1 + |z|)
  double gradient = 0.0;         // relative error of finite-difference grad Phi vs phi
  double potential_sign = 0.0;   // max(0, Phi(y))
  double convexity = 0.0;        // max(0, Phi(mid) - mean(Phi(y1), Phi(y2)))
  int samples = 0;

  double worst() const;
  bool within(double tol) const { return worst() <= tol; }
};

HypothesisDiagnostics check_hypotheses(const PhiMap& map, int dim, int sample_count,
                                       std::uint64_t seed);

}  // namespace philap
