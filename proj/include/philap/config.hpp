#pragma once

// Problem configuration files (INI), the preset catalog, and result writers.
//
// Schema (required keys marked *):
//   [problem]  kind = full | auxiliary, T*, M*, N (default 1)
//   [phi]      variant* = relativistic | p_relativistic, a*, p (p_relativistic only)
//   [boundary] variant* = dirichlet | neumann | periodic | antiperiodic | subspace | strip
//              a_coef, b_coef (subspace); sigma or sigma_frac (strip, sigma_frac is in units of T a)
//              g = none | quadratic | exp_f | robin; g_c (quadratic); g_k0, g_k1 (robin)
//   [potential] name = zero | pendulum | periodic_cos | quadratic; rho, beta, c
//   [h]        variant = none | sin | cos | manufactured; amplitude, component (1-based)
//   [data]     x, y: comma-separated endpoint data for auxiliary Dirichlet/Neumann problems
//   [solver]   mode = auto | minimize | critical_point; tol_grad, tol_fix, max_outer, damping,
//              seed, margin, anderson_memory, check_samples, inclusion = energy | splitting
//   [refine]   levels = comma-separated M values
//   [output]   csv, report, table: file names relative to the output directory

#include <philap/variational.hpp>
#include <philap/verification.hpp>

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace philap {

/// Malformed or inconsistent configuration; the message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProblemConfig {
  std::string kind = "full";
  double T = 1.0;
  int M = 400;
  int N = 1;

  std::string phi_variant = "relativistic";
  double a = 1.0;
  double p = 2.0;

  std::string boundary_variant = "periodic";
  double a_coef = 1.0;
  double b_coef = 1.0;
  std::optional<double> sigma;
  std::optional<double> sigma_frac;
  std::string g = "none";
  double g_c = 1.0;
  double g_k0 = 0.0;
  double g_k1 = 0.0;

  std::string potential = "zero";
  double rho = 1.0;
  double beta = 0.0;
  double c = 0.0;

  std::string h_variant = "none";
  double amplitude = 0.0;
  int component = 1;

  std::vector<double> x;
  std::vector<double> y;

  std::string solver_mode = "auto";
  double tol_grad = 1e-9;
  double tol_fix = 1e-10;
  int max_outer = 500;
  double damping = 1.0;
  std::uint64_t seed = 7;
  double margin = 1e-6;
  int anderson_memory = 5;
  int check_samples = 50;
  std::string inclusion = "energy";

  std::vector<int> levels{200, 400, 800};

  std::string csv = "solution.csv";
  std::string report = "report.ini";
  std::string table = "refine.csv";

  bool operator==(const ProblemConfig&) const = default;

  bool is_auxiliary() const { return kind == "auxiliary"; }
};

ProblemConfig parse_config(std::istream& in);
ProblemConfig load_config(const std::string& path);
/// Canonical INI text; parse_config(echo_config(c)) == c.
std::string echo_config(const ProblemConfig& cfg);

/// Throws ConfigError for unknown variants or invalid parameters.
ProblemSpec to_spec(const ProblemConfig& cfg);
SolverOptions to_solver_options(const ProblemConfig& cfg);

struct PresetInfo {
  std::string name;
  std::string description;
};
std::vector<PresetInfo> list_presets();
/// Throws ConfigError for an unknown name.
ProblemConfig preset(const std::string& name);

/// Manufactured auxiliary solution u*(t) = 0.04 sin(2 pi t / T) + 0.1 t^2 and its
/// derivatives; the "manufactured" h variant is -[phi(u*')]' + u*.
struct Manufactured {
  double T = 1.0;
  double u(double t) const;
  double du(double t) const;
  double ddu(double t) const;
};

/// Parses a comma-separated list of numbers.
std::vector<double> parse_list(const std::string& text, const std::string& field);

/// Shortest round-trip decimal text.
std::string format_double(double v);

/// Columns t, u_1..u_N, phi_du_1..phi_du_N; interior fluxes are averages of the adjacent
/// midpoint fluxes, endpoint fluxes use the conservative recovery of the given mode.
void write_solution_csv(std::ostream& out, const ProblemSpec& spec, const GridFunction& u,
                        const EnergyMode& mode);
/// Reads the u columns of a solution CSV written by write_solution_csv.
GridFunction read_solution_csv(std::istream& in, const ProblemSpec& spec);

struct RunInfo {
  std::string solver;  // method that produced u
  int iterations = 0;
  double residual = 0.0;
  double critical_gap = 0.0;
};

void write_report(std::ostream& out, const SolveReport& report,
                  const std::optional<RunInfo>& run = std::nullopt);
void write_regime(std::ostream& out, const RegimeReport& regime);
void write_refine_table(std::ostream& out, const std::vector<RefineRow>& rows);

}  // namespace philap
