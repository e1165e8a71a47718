#pragma once

// Solvers for the full problem: energy minimization, the critical-point fixed-point
// iteration u -> S(u + grad F(., u) + h), and the regime classifier.

#include <philap/auxiliary.hpp>
#include <philap/errors.hpp>
#include <philap/regime.hpp>

#include <cstdint>
#include <vector>

namespace philap {

enum class SolverMode { Minimize, CriticalPoint, Auto };

std::string to_string(SolverMode m);

struct SolverOptions {
  double tol_grad = 1e-9;   // stationarity residual for minimize_energy
  double tol_fix = 1e-10;   // sup-norm fixed-point update for critical_point_iteration
  int max_outer = 500;
  double damping = 1.0;     // mixing weight of the fixed-point map
  std::uint64_t seed = 7;
  double margin = 1e-6;     // derivative cap a (1 - margin)
  SolverMode mode = SolverMode::Auto;
  int anderson_memory = 5;  // 0 gives plain damped iteration
  int check_samples = 50;   // admissible directions in the critical-point post-check
  double check_tol = 1e-6;
  AuxiliaryOptions inner = inner_defaults();

  static AuxiliaryOptions inner_defaults() {
    AuxiliaryOptions a;
    a.inclusion_method = InclusionMethod::Energy;
    a.newton_tol = 1e-12;
    return a;
  }
  /// Throws DomainError on nonpositive tolerances or caps.
  void validate() const;
};

/// Iteration failure that carries the best iterate and the residual trace.
class SolverFailure : public ConvergenceError {
 public:
  SolverFailure(const std::string& what, GridFunction best, std::vector<double> trace)
      : ConvergenceError(what), best_(std::move(best)), trace_(std::move(trace)) {}
  const GridFunction& best() const { return best_; }
  const std::vector<double>& trace() const { return trace_; }

 private:
  GridFunction best_;
  std::vector<double> trace_;
};

struct SolverResult {
  GridFunction u;
  SolverMode mode_used = SolverMode::Minimize;
  int iterations = 0;
  double residual = 0.0;        // stationarity (Minimize) or fixed-point update (CriticalPoint)
  std::vector<double> trace;    // energies (Minimize) or fixed-point residuals (CriticalPoint)
  double critical_gap = 0.0;    // smallest sampled critical-point inequality value
};

/// u = 0; the origin is admissible for every boundary functional in the catalog.
GridFunction default_init(const ProblemSpec& spec);

/// Projects endpoints into K and contracts toward 0 until max|Du| <= a (1 - margin).
GridFunction make_admissible(const ProblemSpec& spec, GridFunction u, double margin);

/// Smallest value of the critical-point inequality over sampled admissible v.
double critical_point_inequality(const ProblemSpec& spec, const GridFunction& u, int samples,
                                 std::uint64_t seed);

SolverResult minimize_energy(const ProblemSpec& spec, const GridFunction& init,
                             const SolverOptions& opts = {});

SolverResult critical_point_iteration(const ProblemSpec& spec, const GridFunction& init,
                                      const SolverOptions& opts = {});

/// Dispatches on opts.mode; Auto picks the fixed-point route for saddle regimes.
SolverResult solve(const ProblemSpec& spec, const SolverOptions& opts = {},
                   const std::optional<GridFunction>& init = std::nullopt);

/// u - sum k_i omega_i e_i with k_i = floor(mean_i / omega_i).
GridFunction reduce_periodic(const ProblemSpec& spec, const GridFunction& u);

struct SaddleCertificate {
  bool is_saddle = false;
  Vec witness;
  double witness_energy = 0.0;
  double solution_energy = 0.0;
};

/// Searches constants x with (x, x) in D(j) and E(x) < E(u) - margin.
SaddleCertificate saddle_certificate(const ProblemSpec& spec, const GridFunction& u,
                                     double margin = 1e-8, std::uint64_t seed = 7);

RegimeReport classify_regime(const ProblemSpec& spec, int radial_samples = 8,
                             std::uint64_t seed = 7, double R = 1.0);

}  // namespace philap
