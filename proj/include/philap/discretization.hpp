#pragma once

// Midpoint/trapezoid discretization of the energy, its gradient, endpoint
// fluxes and the Rayleigh constant lambda_1.

#include <philap/problem.hpp>

#include <optional>
#include <utility>

namespace philap {

/// Full: E = Psi + J - sum w (F + <h|u>) with h from the ProblemSpec.
/// Auxiliary: E = Psi + J + sum w (|u|^2 / 2 - <h|u>) with the given node samples of h.
struct EnergyMode {
  enum class Kind { Full, Auxiliary };
  Kind kind = Kind::Full;
  NodeMat h;  // Auxiliary only

  static EnergyMode full() { return {}; }
  static EnergyMode auxiliary(NodeMat h) { return {Kind::Auxiliary, std::move(h)}; }
  bool is_full() const { return kind == Kind::Full; }
};

struct EnergyBreakdown {
  double psi = 0.0;
  double j_term = 0.0;
  double f_term = 0.0;                // Full only
  std::optional<double> quad_term;    // Auxiliary only
  double total = 0.0;
};

/// Du_i = (u_{i+1} - u_i) / dt, M x N.
NodeMat derivative(const GridFunction& u);
double max_derivative_norm(const GridFunction& u);

struct MeanOscillation {
  Vec mean;
  GridFunction oscillation;
};
MeanOscillation mean_oscillation(const GridFunction& u);

/// max_i |Du_i| <= a (1 - margin).
bool feasible(const GridFunction& u, const PhiMap& phi, double margin);

EnergyBreakdown energy_eval(const ProblemSpec& spec, const GridFunction& u,
                            const EnergyMode& mode);

/// Psi plus the node terms of the mode, without J; +inf when max|Du| > a.
double smooth_energy(const ProblemSpec& spec, const GridFunction& u, const EnergyMode& mode);

/// Partial derivatives of smooth_energy with respect to the node values.
GridFunction smooth_gradient(const ProblemSpec& spec, const GridFunction& u,
                             const EnergyMode& mode);

/// Right-hand side at the nodes: grad F + h (Full) or h - u (Auxiliary).
NodeMat node_source(const ProblemSpec& spec, const GridFunction& u, const EnergyMode& mode);

enum class FluxRecovery { Conservative, QuadraticExtrapolation };

/// (phi(u')(0), phi(u')(T)). Conservative recovery uses the half-cell balance at each
/// end, which makes the flux pair the exact gradient of the discrete reduced energy.
EndpointPair endpoint_fluxes(const ProblemSpec& spec, const GridFunction& u,
                             const EnergyMode& mode,
                             FluxRecovery recovery = FluxRecovery::Conservative);

/// Smallest Rayleigh quotient |v'|^2 / |v|^2 over grid functions whose endpoints lie in
/// the (linear) admissible set of the boundary functional.
double rayleigh_lambda1(const BoundaryFunctional& boundary, const Grid& grid, int N);

}  // namespace philap
