#pragma once

// Convex boundary functionals j = g + I_K on R^N x R^N: catalog sets K,
// smooth convex couplings g, projections, prox maps and normal cones.

#include <philap/types.hpp>

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>

namespace philap {

enum class SetKind { Point, FullSpace, Diagonal, AntiDiagonal, Subspace, Strip };

/// Closed convex cone/strip K containing the origin. All catalog sets act
/// componentwise, so every operation is dimension-agnostic.
struct ConvexSetK {
  SetKind kind = SetKind::FullSpace;
  double a_coef = 1.0;  // Subspace {a x = b y}
  double b_coef = 1.0;
  double sigma = std::numeric_limits<double>::infinity();  // Strip |x - y| <= sigma

  static ConvexSetK point() { return {SetKind::Point}; }
  static ConvexSetK full_space() { return {SetKind::FullSpace}; }
  static ConvexSetK diagonal() { return {SetKind::Diagonal}; }
  static ConvexSetK anti_diagonal() { return {SetKind::AntiDiagonal}; }
  static ConvexSetK subspace(double a, double b);
  static ConvexSetK strip(double sigma);

  /// Strip(0) behaves as Diagonal and Strip(inf) as FullSpace.
  SetKind effective_kind() const;
  /// True when K is a linear subspace (everything except a strip with 0 < sigma < inf).
  bool is_linear() const { return effective_kind() != SetKind::Strip; }
  /// Orthonormal basis (2 x k) of the per-component subspace; requires is_linear().
  Eigen::Matrix2Xd basis() const;
  std::string describe() const;
};

enum class GKind { None, QuadraticDifference, ExpDifference, Robin, Custom };

/// Smooth convex part g with g(0) = 0 and grad g(0) = 0.
struct SmoothPart {
  GKind kind = GKind::None;
  double c = 1.0;    // QuadraticDifference: (c/2)|x - y|^2
  double k0 = 0.0;   // Robin: (k0/2)|x|^2 + (k1/2)|y|^2
  double k1 = 0.0;
  // Custom: value and stacked gradient (grad_x, grad_y).
  std::function<double(const Vec&, const Vec&)> value_fn;
  std::function<EndpointPair(const Vec&, const Vec&)> gradient_fn;
  bool custom_difference_form = false;

  static SmoothPart none() { return {}; }
  static SmoothPart quadratic_difference(double c);
  /// f(x - y) with f(d) = (exp(|d|^2) - 1) / 2.
  static SmoothPart exp_difference();
  static SmoothPart robin(double k0, double k1);
  static SmoothPart custom(std::function<double(const Vec&, const Vec&)> value,
                           std::function<EndpointPair(const Vec&, const Vec&)> gradient,
                           bool difference_form);

  bool present() const { return kind != GKind::None; }
  /// g(x, y) = f(x - y) for some f.
  bool difference_form() const;
  double value(const Vec& x, const Vec& y) const;
  EndpointPair gradient(const Vec& x, const Vec& y) const;
  /// Hessian in stacked (x, y) coordinates, 2N x 2N.
  Mat hessian(const Vec& x, const Vec& y) const;
};

/// j = g + I_K.
struct BoundaryFunctional {
  ConvexSetK set;
  SmoothPart g;

  static BoundaryFunctional dirichlet() { return {ConvexSetK::point(), {}}; }
  static BoundaryFunctional neumann() { return {ConvexSetK::full_space(), {}}; }
  static BoundaryFunctional periodic() { return {ConvexSetK::diagonal(), {}}; }
  static BoundaryFunctional antiperiodic() { return {ConvexSetK::anti_diagonal(), {}}; }
  std::string describe() const;
};

/// g(x, y) on K, +inf elsewhere.
double j_eval(const BoundaryFunctional& j, const Vec& x, const Vec& y, double tol = 1e-12);
bool in_set(const ConvexSetK& set, const Vec& x, const Vec& y, double tol = 1e-12);
EndpointPair project_K(const ConvexSetK& set, const Vec& x, const Vec& y);

/// argmin_z j(z) + |z - (x, y)|^2 / (2 step).
EndpointPair prox_j(const BoundaryFunctional& j, const Vec& x, const Vec& y, double step);

/// argmin_z j(z) + (z - center)^T S (z - center) / 2 for symmetric positive definite S
/// in stacked (x, y) coordinates.
EndpointPair prox_metric(const BoundaryFunctional& j, const EndpointPair& center, const Mat& S);

/// Euclidean distance from xi to N_K(z), closed form.
double normal_cone_distance(const ConvexSetK& set, const EndpointPair& z, const EndpointPair& xi,
                            double tol = 1e-9);
bool normal_cone_membership(const ConvexSetK& set, const EndpointPair& z, const EndpointPair& xi,
                            double tol);

/// dist(xi - grad g(z), N_K(z)): the exact distance from xi to the subdifferential of j at z.
double subdifferential_distance(const BoundaryFunctional& j, const EndpointPair& z,
                                const EndpointPair& xi, double tol = 1e-9);

/// Largest sampled violation of j(w) >= j(z) + <xi | w - z> over probes w in D(j).
double subdifferential_residual(const BoundaryFunctional& j, const EndpointPair& z,
                                const EndpointPair& xi, double probe_radius, int probe_count,
                                std::uint64_t seed);

bool cone_diagonal_trivial(const BoundaryFunctional& j);
std::pair<bool, bool> projections_bounded(const BoundaryFunctional& j);
bool shift_invariant_diagonal(const BoundaryFunctional& j);
/// j vanishes on the diagonal.
bool zero_on_diagonal(const BoundaryFunctional& j);
/// j is bounded above on its effective domain.
bool bounded_on_domain(const BoundaryFunctional& j);

}  // namespace philap
