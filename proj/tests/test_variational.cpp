#include <doctest.h>

#include "oracles.hpp"

#include <philap/config.hpp>
#include <philap/variational.hpp>

using namespace philap;

namespace {

Vec v1(double x) { return Vec::Constant(1, x); }

ProblemSpec from_preset(const std::string& name, int M) {
  ProblemConfig c = preset(name);
  c.M = M;
  return to_spec(c);
}

}  // namespace

TEST_CASE("homogeneous Dirichlet problem with F = 0 has the zero solution") {
  ProblemSpec s;
  s.boundary = BoundaryFunctional::dirichlet();
  s.grid = Grid::make(1.0, 50);
  const GridFunction init = GridFunction::sample(s.grid, 1, [](double t) {
    return v1(0.2 * std::sin(oracle::kPi * t));
  });
  const SolverResult r = minimize_energy(s, init);
  CHECK(r.u.sup_norm() < 1e-9);
  CHECK(r.mode_used == SolverMode::Minimize);
}

TEST_CASE("anticoercive pendulum: minimizer solves the discrete problem") {
  const ProblemSpec s = from_preset("pendulum_anticoercive", 200);
  const RegimeReport reg = classify_regime(s);
  CHECK(reg.has(RegimeFlag::AntiCoercive));
  CHECK_FALSE(reg.has(RegimeFlag::SemiCoerciveSaddle));
  const SolverResult r = solve(s);
  CHECK(r.mode_used == SolverMode::Minimize);
  const SolveReport rep = check_solution(s, r.u);
  CHECK(rep.ode_residual <= 1e-6);
  CHECK(rep.boundary_ok);
  CHECK(energy_eval(s, r.u, EnergyMode::full()).total <=
        energy_eval(s, default_init(s), EnergyMode::full()).total + 1e-12);
}

TEST_CASE("semicoercive pendulum: critical point and saddle witness") {
  const ProblemSpec s = from_preset("pendulum_semicoercive", 200);
  const RegimeReport reg = classify_regime(s);
  CHECK(reg.has(RegimeFlag::SemiCoerciveSaddle));
  const SolverResult r = solve(s);
  CHECK(r.mode_used == SolverMode::CriticalPoint);
  CHECK(check_solution(s, r.u).ode_residual <= 1e-6);
  CHECK(r.critical_gap >= -1e-6);
  const SaddleCertificate cert = saddle_certificate(s, r.u);
  CHECK(cert.is_saddle);
  CHECK(cert.witness_energy < cert.solution_energy);

  const ProblemSpec anti = from_preset("pendulum_anticoercive", 200);
  CHECK_FALSE(saddle_certificate(anti, solve(anti).u).is_saddle);
}

TEST_CASE("F = 0 Dirichlet has no saddle witness") {
  ProblemSpec s;
  s.boundary = BoundaryFunctional::dirichlet();
  s.grid = Grid::make(1.0, 40);
  CHECK_FALSE(saddle_certificate(s, GridFunction::zeros(s.grid, 1)).is_saddle);
}

TEST_CASE("Dirichlet regime reports lambda_1 near pi^2") {
  ProblemSpec s;
  s.boundary = BoundaryFunctional::dirichlet();
  s.grid = Grid::make(1.0, 400);
  const RegimeReport r = classify_regime(s);
  REQUIRE(r.lambda1.has_value());
  CHECK(*r.lambda1 == doctest::Approx(oracle::kPi * oracle::kPi).epsilon(0.02));
  CHECK(r.has(RegimeFlag::Lambda1Positive));
  CHECK(r.has(RegimeFlag::ConeDiagonalTrivial));
}

TEST_CASE("periodic reduction shifts the mean into one period") {
  const ProblemSpec s = from_preset("periodic_cos", 100);
  REQUIRE(s.periods.has_value());
  const double w = (*s.periods)[0];
  const GridFunction u = GridFunction::sample(s.grid, 1, [&](double t) {
    return v1(2.5 * w + 0.1 * std::sin(2 * oracle::kPi * t));
  });
  const GridFunction r = reduce_periodic(s, u);
  CHECK(mean_oscillation(r).mean[0] == doctest::Approx(0.5 * w).epsilon(1e-12));
  CHECK(energy_eval(s, r, EnergyMode::full()).total ==
        doctest::Approx(energy_eval(s, u, EnergyMode::full()).total).epsilon(1e-12));

  ProblemSpec d = s;
  d.boundary = BoundaryFunctional::dirichlet();
  CHECK_THROWS_AS(reduce_periodic(d, u), DomainError);
}

TEST_CASE("critical-point iteration from a constant start, Neumann F = 0") {
  ProblemSpec s;
  s.boundary = BoundaryFunctional::neumann();
  s.grid = Grid::make(1.0, 100);
  s.h = [](double t) { return v1(std::cos(2 * oracle::kPi * t)); };
  s.h_mean_zero = true;
  const SolverResult r = critical_point_iteration(s, GridFunction::constant(s.grid, v1(0.3)));
  CHECK(r.mode_used == SolverMode::CriticalPoint);
  CHECK(check_solution(s, r.u).ode_residual <= 1e-6);
}

TEST_CASE("option validation") {
  SolverOptions o;
  o.tol_fix = 0.0;
  CHECK_THROWS_AS(o.validate(), DomainError);
  SolverOptions q;
  q.max_outer = 0;
  CHECK_THROWS_AS(q.validate(), DomainError);
}
