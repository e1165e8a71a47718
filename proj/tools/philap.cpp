// Command-line front end: solve | verify | regime | refine | presets | echo.
// Exit codes: 0 success, 1 configuration error, 2 infeasible data, 3 convergence failure.

#include <philap/config.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

namespace fs = std::filesystem;
using namespace philap;

namespace {

enum Exit { kOk = 0, kConfig = 1, kInfeasible = 2, kConvergence = 3 };

struct Common {
  std::string config;
  std::string preset_name;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Common& c) {
  auto* cfg = cmd->add_option("--config", c.config, "INI problem configuration");
  auto* pre = cmd->add_option("--preset", c.preset_name, "use a catalog preset instead of a file");
  cfg->excludes(pre);
  cmd->add_option("--out", c.out, "output directory")->capture_default_str();
  cmd->add_option("--seed", c.seed, "override solver.seed");
}

ProblemConfig load(const Common& c) {
  ProblemConfig cfg;
  if (!c.config.empty()) {
    cfg = load_config(c.config);
  } else if (!c.preset_name.empty()) {
    cfg = preset(c.preset_name);
  } else {
    throw ConfigError("one of --config or --preset is required");
  }
  if (c.seed) cfg.seed = *c.seed;
  return cfg;
}

std::ofstream open_out(const Common& c, const std::string& name) {
  fs::create_directories(c.out);
  const fs::path p = fs::path(c.out) / name;
  std::ofstream f(p);
  if (!f) throw ConfigError("output: cannot write " + p.string());
  return f;
}

Vec data(const std::vector<double>& v, int n) {
  return v.empty() ? Vec(Vec::Zero(n)) : Vec(Eigen::Map<const Vec>(v.data(), n));
}

// Auxiliary problems: data-driven Dirichlet/Neumann, otherwise the boundary inclusion.
GridFunction solve_auxiliary(const ProblemConfig& cfg, const ProblemSpec& spec,
                             const SolverOptions& opts) {
  const NodeMat h = spec.h_samples();
  const Vec x = data(cfg.x, spec.N), y = data(cfg.y, spec.N);
  if (cfg.boundary_variant == "dirichlet") {
    DirichletResult r = solve_dirichlet(spec.phi, h, x, y, spec.grid, opts.inner);
    if (const auto* bad = std::get_if<Infeasible>(&r)) {
      throw InfeasibleError("Dirichlet data violate |y - x| < T a", bad->gap);
    }
    return std::get<GridFunction>(std::move(r));
  }
  if (cfg.boundary_variant == "neumann" && (!cfg.x.empty() || !cfg.y.empty())) {
    return solve_neumann(spec.phi, h, x, y, spec.grid, opts.inner);
  }
  return solve_P_partial_j(spec.phi, spec.boundary, h, spec.grid, opts.inner).u;
}

// For data-driven auxiliary problems the boundary check compares with the prescribed data.
void data_boundary_check(const ProblemConfig& cfg, const ProblemSpec& spec, const GridFunction& u,
                         SolveReport& rep) {
  if (!cfg.is_auxiliary()) return;
  const Vec x = data(cfg.x, spec.N), y = data(cfg.y, spec.N);
  double mismatch = 0.0;
  if (cfg.boundary_variant == "dirichlet") {
    mismatch = std::max((u.node(0) - x).norm(), (u.node(u.grid.M) - y).norm());
    rep.boundary_tolerance = 1e-12 * (1.0 + x.norm() + y.norm());
  } else if (cfg.boundary_variant == "neumann" && (!cfg.x.empty() || !cfg.y.empty())) {
    const EndpointPair p = endpoint_fluxes(spec, u, mode_for(spec, EnergyMode::Kind::Auxiliary));
    mismatch = std::max((p.x - x).norm(), (p.y - y).norm());
  } else {
    return;
  }
  rep.boundary_residual = mismatch;
  rep.boundary_distance = mismatch;
  rep.boundary_ok = mismatch <= rep.boundary_tolerance;
}

EnergyMode mode_of(const ProblemConfig& cfg, const ProblemSpec& spec) {
  return mode_for(spec, cfg.is_auxiliary() ? EnergyMode::Kind::Auxiliary : EnergyMode::Kind::Full);
}

void summary(const SolveReport& r) {
  std::cout << "ode_residual = " << format_double(r.ode_residual)
            << "\nboundary_residual = " << format_double(r.boundary_residual)
            << "\nboundary_ok = " << (r.boundary_ok ? "true" : "false")
            << "\nstrip_gap = " << format_double(r.strip_gap)
            << "\nfeasibility_margin = " << format_double(r.feasibility_margin) << "\n";
}

int run_solve(const Common& c) {
  const ProblemConfig cfg = load(c);
  const ProblemSpec spec = to_spec(cfg);
  const SolverOptions opts = to_solver_options(cfg);
  GridFunction u;
  RunInfo info;
  if (cfg.is_auxiliary()) {
    u = solve_auxiliary(cfg, spec, opts);
    info.solver = "auxiliary_" + cfg.boundary_variant;
  } else {
    SolverResult r = solve(spec, opts);
    u = std::move(r.u);
    info.solver = to_string(r.mode_used);
    info.iterations = r.iterations;
    info.residual = r.residual;
    info.critical_gap = r.critical_gap;
  }
  const EnergyMode mode = mode_of(cfg, spec);
  SolveReport rep = check_solution(spec, u, mode);
  data_boundary_check(cfg, spec, u, rep);
  if (!cfg.is_auxiliary()) rep.regime = classify_regime(spec, 8, cfg.seed);
  {
    std::ofstream f = open_out(c, cfg.csv);
    write_solution_csv(f, spec, u, mode);
  }
  {
    std::ofstream f = open_out(c, cfg.report);
    write_report(f, rep, info);
  }
  std::cout << "solver = " << info.solver << "\n";
  summary(rep);
  return kOk;
}

int run_verify(const Common& c, const std::string& solution, double ode_tol) {
  const ProblemConfig cfg = load(c);
  const ProblemSpec spec = to_spec(cfg);
  std::ifstream in(solution);
  if (!in) throw ConfigError(solution + ": cannot open solution file");
  const GridFunction u = read_solution_csv(in, spec);
  SolveReport rep = check_solution(spec, u, mode_of(cfg, spec));
  data_boundary_check(cfg, spec, u, rep);
  {
    std::ofstream f = open_out(c, cfg.report);
    write_report(f, rep);
  }
  summary(rep);
  const bool pass = rep.ode_residual <= ode_tol && rep.boundary_ok && rep.strip_ok &&
                    rep.feasibility_margin > 0.0;
  std::cout << "verdict = " << (pass ? "pass" : "fail") << "\n";
  return kOk;
}

int run_regime(const Common& c, int samples) {
  const ProblemConfig cfg = load(c);
  const ProblemSpec spec = to_spec(cfg);
  const RegimeReport rep = classify_regime(spec, samples, cfg.seed);
  {
    std::ofstream f = open_out(c, cfg.report);
    write_regime(f, rep);
  }
  write_regime(std::cout, rep);
  return kOk;
}

int run_refine(const Common& c) {
  const ProblemConfig cfg = load(c);
  const ProblemSpec spec = to_spec(cfg);
  const SolverOptions opts = to_solver_options(cfg);
  GridSolver solver;
  std::map<int, GridFunction> solved;
  if (cfg.is_auxiliary()) {
    solver = [&](const ProblemSpec& s) {
      GridFunction u = solve_auxiliary(cfg, s, opts);
      solved[s.grid.M] = u;
      return u;
    };
  } else {
    solver = [&](const ProblemSpec& s) { return solve(s, opts).u; };
  }
  std::function<Vec(double)> exact;
  if (cfg.h_variant == "manufactured") {
    const Manufactured m{cfg.T};
    exact = [m](double t) { return Vec(Vec::Constant(1, m.u(t))); };
  }
  const auto kind = cfg.is_auxiliary() ? EnergyMode::Kind::Auxiliary : EnergyMode::Kind::Full;
  std::vector<RefineRow> rows = refine_study(spec, solver, cfg.levels, kind, exact);
  for (RefineRow& row : rows) {
    auto it = solved.find(row.M);
    if (it == solved.end()) continue;
    const ProblemSpec level = spec.with_grid(row.M);
    SolveReport rep;
    rep.boundary_residual = row.boundary_residual;
    rep.boundary_tolerance = 1e-6;
    data_boundary_check(cfg, level, it->second, rep);
    row.boundary_residual = rep.boundary_residual;
  }
  {
    std::ofstream f = open_out(c, cfg.table);
    write_refine_table(f, rows);
  }
  write_refine_table(std::cout, rows);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-point boundary value problems with singular phi-Laplacians"};
  app.require_subcommand(1);

  Common solve_c, verify_c, regime_c, refine_c, echo_c;
  std::string solution;
  double ode_tol = 1e-4;
  int samples = 8;

  auto* s = app.add_subcommand("solve", "solve a problem and write solution CSV and report");
  add_common(s, solve_c);
  auto* v = app.add_subcommand("verify", "check a solution CSV against a problem");
  add_common(v, verify_c);
  v->add_option("--solution", solution, "solution CSV written by solve")->required();
  v->add_option("--ode-tol", ode_tol, "ODE residual bound for the verdict")->capture_default_str();
  auto* g = app.add_subcommand("regime", "classify the growth regime of a problem");
  add_common(g, regime_c);
  g->add_option("--samples", samples, "random directions on the radial ladder")
      ->capture_default_str();
  auto* r = app.add_subcommand("refine", "grid refinement study over refine.levels");
  add_common(r, refine_c);
  auto* p = app.add_subcommand("presets", "list the preset catalog");
  auto* e = app.add_subcommand("echo", "print the canonical form of a configuration");
  add_common(e, echo_c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (s->parsed()) return run_solve(solve_c);
    if (v->parsed()) return run_verify(verify_c, solution, ode_tol);
    if (g->parsed()) return run_regime(regime_c, samples);
    if (r->parsed()) return run_refine(refine_c);
    if (p->parsed()) {
      for (const PresetInfo& info : list_presets()) {
        std::cout << info.name << "\t" << info.description << "\n";
      }
      return kOk;
    }
    if (e->parsed()) {
      std::cout << echo_config(load(echo_c));
      return kOk;
    }
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kConfig;
  } catch (const InfeasibleError& err) {
    std::cerr << "infeasible: " << err.what() << " (gap " << format_double(err.gap()) << ")\n";
    return kInfeasible;
  } catch (const ConvergenceError& err) {
    std::cerr << "convergence failure: " << err.what() << "\n";
    return kConvergence;
  } catch (const DomainError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kConfig;
  } catch (const UnsupportedError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kConfig;
  }
  return kConfig;
}
