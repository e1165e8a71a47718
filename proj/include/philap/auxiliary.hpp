#pragma once

// Auxiliary problem  -[phi(u')]' + u = h  with Neumann data, Dirichlet data, or the
// boundary inclusion (phi(u')(0), -phi(u')(T)) in dj(u(0), u(T)).

#include <philap/discretization.hpp>

#include <optional>
#include <variant>
#include <vector>

namespace philap {

enum class NeumannMethod { Auto, Picard, Newton };
enum class InclusionMethod { Splitting, Energy };

struct AuxiliaryOptions {
  double newton_tol = 1e-10;     // strong-form residual
  double picard_tol = 1e-12;     // sup-norm update
  double splitting_tol = 1e-10;  // |z+ - z| / lambda
  double damping = 0.5;
  double damping_floor = 1.0 / 64.0;
  int inner_cap = 10000;
  int outer_cap = 1000;
  int auto_picard_cap = 1000;    // Picard iterations before Auto switches to Newton
  double margin = 1e-6;
  NeumannMethod neumann_method = NeumannMethod::Auto;
  InclusionMethod inclusion_method = InclusionMethod::Splitting;
};

/// Samples h on the grid; an empty function gives h = 0.
NodeMat sample_h(const Grid& grid, int N, const std::function<Vec(double)>& h);

/// Problem record used by the auxiliary solvers: F = 0, boundary j.
ProblemSpec auxiliary_spec(const PhiMap& phi, const BoundaryFunctional& j, const Grid& grid,
                           int N);

/// phi(u')(0) = x, phi(u')(T) = y. Always solvable.
GridFunction solve_neumann(const PhiMap& phi, const NodeMat& h, const Vec& x, const Vec& y,
                           const Grid& grid, const AuxiliaryOptions& opts = {});

struct Infeasible {
  double gap;  // |y - x| - T a
};
using DirichletResult = std::variant<GridFunction, Infeasible>;

/// u(0) = x, u(T) = y; Infeasible when |y - x| >= T a (1 - margin).
DirichletResult solve_dirichlet(const PhiMap& phi, const NodeMat& h, const Vec& x, const Vec& y,
                                const Grid& grid, const AuxiliaryOptions& opts = {},
                                const GridFunction* warm = nullptr);

struct ThetaEval {
  EndpointPair input;
  EndpointPair theta;   // (-phi(u')(0), phi(u')(T))
  double energy = 0.0;  // reduced energy: auxiliary energy of u_{x,y}
  GridFunction u;
  int iterations = 0;
};

/// Throws InfeasibleError outside D_{Ta}.
ThetaEval theta_eval(const PhiMap& phi, const NodeMat& h, const Vec& x, const Vec& y,
                     const Grid& grid, const AuxiliaryOptions& opts = {},
                     const GridFunction* warm = nullptr);

struct InclusionResult {
  GridFunction u;
  EndpointPair endpoints;
  EndpointPair flux_pair;  // (phi(u')(0), -phi(u')(T))
  double inclusion_residual = 0.0;
  int iterations = 0;
  std::vector<double> residual_history;
};

/// Solves 0 in dj(x, y) + theta(x, y) and returns u_{x,y}.
InclusionResult solve_P_partial_j(const PhiMap& phi, const BoundaryFunctional& j,
                                  const NodeMat& h, const Grid& grid,
                                  const AuxiliaryOptions& opts = {},
                                  std::optional<EndpointPair> start = std::nullopt,
                                  const GridFunction* warm = nullptr);

struct LambdaFixedPoint {
  EndpointPair z;
  double q_bar = 0.0;  // a-priori constant; |x| + |y| <= 2 q_bar
  int iterations = 0;
};

/// Fixed point of (x, y) -> endpoints of the Neumann solution with fluxes (x - xi, eta - y).
LambdaFixedPoint lambda_fixed_point(const PhiMap& phi, const NodeMat& h, const Vec& xi,
                                    const Vec& eta, const Grid& grid,
                                    const AuxiliaryOptions& opts = {});

}  // namespace philap
