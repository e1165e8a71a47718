#pragma once

// Solver-independent checks of candidate solutions.

#include <philap/discretization.hpp>
#include <philap/regime.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace philap {

struct NamedCheck {
  enum class Status { Pass, Fail, Skipped };
  std::string name;
  Status status = Status::Skipped;
  double value = 0.0;  // left-hand side of the bound
  double bound = 0.0;  // right-hand side including slack
  std::string note;
};

std::string to_string(NamedCheck::Status s);

/// Branch analysis for strip boundary functionals g + I_{S_sigma}.
struct StripBranches {
  bool steklov = false;   // |d| < sigma, fluxes equal grad g
  bool contact = false;   // |d| = sigma, fluxes differ from grad g by s d with s >= 0
  double s = 0.0;         // contact multiplier (least squares)
  double mismatch = 0.0;  // residual of the branch that holds (or the smaller one)
  int holding() const { return static_cast<int>(steklov) + static_cast<int>(contact); }
};

struct SolveReport {
  std::string mode;                  // "full" or "auxiliary"
  double ode_residual = 0.0;         // sup over interior nodes
  double boundary_residual = 0.0;    // sampled subgradient inequality violation
  double boundary_distance = 0.0;    // closed-form distance to dj
  double boundary_tolerance = 0.0;   // 1e-6 (1 + |flux pair|)
  bool boundary_ok = false;
  EndpointPair flux_pair;            // (phi(u')(0), -phi(u')(T))
  double strip_gap = 0.0;            // T a - |u(0) - u(T)|
  bool strip_ok = false;
  double feasibility_margin = 0.0;   // a - max|Du|
  std::optional<StripBranches> strip_branches;
  std::vector<NamedCheck> apriori_checks;
  EnergyBreakdown energy;
  std::optional<RegimeReport> regime;
  int iterations = 0;
  double wall_time = 0.0;            // seconds; not serialized by default
};

/// Conservative strong-form residual at interior nodes.
double ode_residual(const ProblemSpec& spec, const GridFunction& u, const EnergyMode& mode);

SolveReport check_solution(const ProblemSpec& spec, const GridFunction& u,
                           const EnergyMode& mode = EnergyMode::full());

std::vector<NamedCheck> invariant_suite(const ProblemSpec& spec, const GridFunction& u);

/// Branches of the strip boundary condition; nullopt for other boundary functionals.
std::optional<StripBranches> strip_branches(const ProblemSpec& spec, const GridFunction& u,
                                            const EnergyMode& mode, double tol = 1e-6);

struct RefineRow {
  int M = 0;
  double ode_residual = 0.0;
  double boundary_residual = 0.0;
  double error = 0.0;         // against the exact solution, or the finest level
  std::optional<double> ratio;  // error(previous level) / error(this level)
};

using GridSolver = std::function<GridFunction(const ProblemSpec&)>;

/// Solves at each M in `levels`; errors are sup-norm against `exact` when given, else
/// against the finest level at shared nodes.
/// In auxiliary mode ProblemSpec::h is the auxiliary right-hand side.
std::vector<RefineRow> refine_study(const ProblemSpec& spec, const GridSolver& solver,
                                    const std::vector<int>& levels,
                                    EnergyMode::Kind kind = EnergyMode::Kind::Full,
                                    const std::function<Vec(double)>& exact = {});

/// Energy mode of the given kind whose auxiliary h is sampled from the ProblemSpec.
EnergyMode mode_for(const ProblemSpec& spec, EnergyMode::Kind kind);

/// Deterministic admissible perturbations v of u: endpoints in K, max|Dv| <= a (1 - margin).
std::vector<GridFunction> sample_admissible(const ProblemSpec& spec, const GridFunction& u,
                                            int count, std::uint64_t seed, double margin = 1e-6);

/// [Psi + J](v) - [Psi + J](u) - sum w <source(u) | v - u>; nonnegative for all admissible v
/// exactly when u is a critical point (auxiliary mode: the variational inequality).
double variational_inequality(const ProblemSpec& spec, const EnergyMode& mode,
                              const GridFunction& u, const GridFunction& v);

}  // namespace philap
