#include <doctest.h>

#include <philap/auxiliary.hpp>
#include <philap/verification.hpp>

#include <cmath>

using namespace philap;

namespace {

Vec v1(double x) { return Vec::Constant(1, x); }

ProblemSpec dirichlet_zero(int M) {
  ProblemSpec s;
  s.boundary = BoundaryFunctional::dirichlet();
  s.grid = Grid::make(1.0, M);
  return s;
}

const NamedCheck& find(const std::vector<NamedCheck>& v, const std::string& name) {
  for (const NamedCheck& c : v)
    if (c.name == name) return c;
  FAIL("missing check " << name);
  return v.front();
}

}  // namespace

TEST_CASE("zero solution of the homogeneous Dirichlet problem") {
  const ProblemSpec s = dirichlet_zero(50);
  const SolveReport r = check_solution(s, GridFunction::zeros(s.grid, 1));
  CHECK(r.ode_residual <= 1e-12);
  CHECK(r.boundary_residual <= 1e-12);
  CHECK(r.boundary_ok);
  CHECK(r.strip_gap == doctest::Approx(1.0));
  CHECK(r.strip_ok);
  CHECK(r.feasibility_margin == doctest::Approx(1.0));
  CHECK(find(r.apriori_checks, "lambda1_bound").status == NamedCheck::Status::Pass);
}

TEST_CASE("a corrupted node is flagged by the ODE residual") {
  ProblemSpec s;
  s.boundary = BoundaryFunctional::periodic();
  s.grid = Grid::make(1.0, 400);
  const NodeMat h = sample_h(s.grid, 1, [](double t) { return v1(std::cos(2 * M_PI * t)); });
  const InclusionResult sol = solve_P_partial_j(s.phi, s.boundary, h, s.grid);
  const EnergyMode mode = EnergyMode::auxiliary(h);
  CHECK(check_solution(s, sol.u, mode).ode_residual <= 1e-6);
  GridFunction bad = sol.u;
  bad.values(200, 0) += 0.1;
  CHECK(check_solution(s, bad, mode).ode_residual > 1e-2);
  GridFunction small = sol.u;
  small.values(200, 0) += 1e-4;  // still inside the derivative ball
  REQUIRE(feasible(small, s.phi, 0.0));
  CHECK(check_solution(s, small, mode).ode_residual > 1e-2);
}

TEST_CASE("strip branches: interior Steklov, contact and wide strips") {
  const Grid g = Grid::make(1.0, 200);
  const PhiMap phi = PhiMap::relativistic();
  auto run = [&](double sigma, double slope) {
    ProblemSpec s;
    s.boundary = {ConvexSetK::strip(sigma), SmoothPart::exp_difference()};
    s.grid = g;
    const NodeMat h = sample_h(g, 1, [=](double t) { return v1(slope * t); });
    const InclusionResult r = solve_P_partial_j(phi, s.boundary, h, g);
    return *strip_branches(s, r.u, EnergyMode::auxiliary(h));
  };
  const StripBranches interior = run(0.5, 0.5);
  CHECK(interior.steklov);
  CHECK_FALSE(interior.contact);
  const StripBranches contact = run(0.02, 4.0);
  CHECK(contact.contact);
  CHECK_FALSE(contact.steklov);
  CHECK(contact.s >= 0.0);
  const StripBranches wide = run(3.0, 4.0);
  CHECK(wide.holding() == 1);
  CHECK(wide.steklov);
}

TEST_CASE("invariant suite skip rules") {
  ProblemSpec s;
  s.boundary = BoundaryFunctional::neumann();
  s.grid = Grid::make(1.0, 100);
  const GridFunction u = GridFunction::sample(s.grid, 1, [](double t) { return v1(0.3 * t * t); });
  const auto checks = invariant_suite(s, u);
  CHECK(find(checks, "lambda1_bound").status == NamedCheck::Status::Skipped);
  CHECK(find(checks, "oscillation").status == NamedCheck::Status::Pass);
  CHECK(find(checks, "l2_pointwise").status == NamedCheck::Status::Pass);
  CHECK(find(checks, "strip").status == NamedCheck::Status::Pass);
  CHECK(find(checks, "bounded_projection").status == NamedCheck::Status::Skipped);

  ProblemSpec strip = s;
  strip.boundary = {ConvexSetK::strip(0.4), {}};
  CHECK(find(invariant_suite(strip, u), "lambda1_bound").status == NamedCheck::Status::Skipped);
}

TEST_CASE("refinement of a constant solution is exact at every level") {
  ProblemSpec s;
  s.boundary = BoundaryFunctional::neumann();
  s.grid = Grid::make(1.0, 10);
  s.h = [](double) { return v1(0.8); };
  const GridSolver solver = [](const ProblemSpec& sp) {
    return solve_neumann(sp.phi, sp.h_samples(), v1(0), v1(0), sp.grid);
  };
  const auto rows = refine_study(s, solver, {20, 40, 80}, EnergyMode::Kind::Auxiliary,
                                 [](double) { return v1(0.8); });
  REQUIRE(rows.size() == 3);
  for (const RefineRow& r : rows) {
    CHECK(r.ode_residual <= 1e-12);
    CHECK(r.error <= 1e-12);
  }
  CHECK_THROWS(refine_study(s, solver, {40, 20}));
}

TEST_CASE("reports are deterministic") {
  ProblemSpec s;
  s.boundary = {ConvexSetK::full_space(), SmoothPart::exp_difference()};
  s.grid = Grid::make(1.0, 100);
  const GridFunction u = GridFunction::sample(s.grid, 1, [](double t) { return v1(std::sin(t)); });
  const SolveReport a = check_solution(s, u), b = check_solution(s, u);
  CHECK(a.boundary_residual == b.boundary_residual);
  CHECK(a.ode_residual == b.ode_residual);
}

TEST_CASE("admissible samples respect K and the derivative cap") {
  ProblemSpec s;
  s.boundary = {ConvexSetK::strip(0.3), {}};
  s.grid = Grid::make(1.0, 64);
  const GridFunction u = GridFunction::zeros(s.grid, 2);
  const auto vs = sample_admissible(s, u, 40, 3);
  CHECK(vs.size() == 40);
  for (const GridFunction& v : vs) {
    CHECK(feasible(v, s.phi, 1e-6));
    CHECK(in_set(s.boundary.set, v.node(0), v.node(64), 1e-12));
  }
}
