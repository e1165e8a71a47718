#pragma once

// Proximal Newton method for  smooth_energy(u) + <lin_x | u_0> + <lin_y | u_M> + j(u_0, u_M)
// over grid functions with max|Du| <= a (1 - margin). The Hessian of the smooth part is
// block tridiagonal; interior nodes are eliminated and the endpoint subproblem is a
// prox in the metric of the Schur complement.

#include <philap/discretization.hpp>

#include <optional>
#include <vector>

namespace philap::detail {

struct NewtonOptions {
  double tol = 1e-10;      // on the strong-form residual
  int max_iter = 500;
  double margin = 1e-6;    // derivative cap a (1 - margin)
};

struct NewtonResult {
  GridFunction u;
  int iterations = 0;
  double residual = 0.0;
  double floor = 0.0;  // residual attributable to rounding; convergence uses max(tol, floor)
  std::vector<double> energy_trace;
  bool converged = false;
};

struct EndpointTerms {
  /// Endpoints are free and penalized by j; absent means the endpoints of init are kept.
  std::optional<BoundaryFunctional> j;
  Vec lin_x;  // optional linear terms (empty = none)
  Vec lin_y;
};

/// Strong-form stationarity residual: interior max |dE/du_i| / w_i; endpoints
/// |z - prox_j(z - grad_B E, 1)|.
double stationarity_residual(const ProblemSpec& spec, const EnergyMode& mode,
                             const EndpointTerms& ends, const GridFunction& u);

NewtonResult prox_newton(const ProblemSpec& spec, const EnergyMode& mode,
                         const EndpointTerms& ends, GridFunction init, const NewtonOptions& opts);

}  // namespace philap::detail
