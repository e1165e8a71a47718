#include <doctest.h>

#include "oracles.hpp"

#include <philap/discretization.hpp>
#include <philap/errors.hpp>

using namespace philap;

namespace {

ProblemSpec base_spec(int M, int N = 1) {
  ProblemSpec s;
  s.phi = PhiMap::relativistic();
  s.boundary = BoundaryFunctional::neumann();
  s.N = N;
  s.grid = Grid::make(1.0, M);
  return s;
}

PotentialField cosine_potential() {
  PotentialField f;
  f.name = "cos";
  f.value = [](double t, const Vec& u) { return (1.0 + t) * (u.array().cos() - 1.0).sum(); };
  f.gradient = [](double t, const Vec& u) -> Vec { return -(1.0 + t) * u.array().sin().matrix(); };
  return f;
}

}  // namespace

TEST_CASE("grid basics") {
  const Grid g = Grid::make(2.0, 4);
  CHECK(g.dt() == 0.5);
  CHECK(g.node(4) == 2.0);
  CHECK(g.midpoint(0) == 0.25);
  const Vec w = g.weights();
  CHECK(w.sum() == doctest::Approx(2.0));
  CHECK(w[0] == 0.25);
  CHECK_THROWS_AS(Grid::make(0.0, 4), DomainError);
  CHECK_THROWS_AS(Grid::make(1.0, 1), DomainError);
}

TEST_CASE("energy vanishes on the zero function and Psi vanishes on constants") {
  ProblemSpec s = base_spec(20, 2);
  s.potential = cosine_potential();
  const GridFunction z = GridFunction::zeros(s.grid, 2);
  CHECK(energy_eval(s, z, EnergyMode::full()).total == doctest::Approx(0.0));
  Vec c(2);
  c << 0.3, -1.1;
  const GridFunction k = GridFunction::constant(s.grid, c);
  const EnergyBreakdown e = energy_eval(s, k, EnergyMode::full());
  CHECK(std::abs(e.psi) < 1e-15);
  // -sum w F(t, c) with F = (1 + t) sum(cos c - 1): the trapezoid rule is exact for linear t.
  const double expect = -1.5 * (c.array().cos() - 1.0).sum();
  CHECK(e.f_term == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("Psi approximates the continuous integral") {
  ProblemSpec s = base_spec(400);
  const GridFunction u = GridFunction::sample(s.grid, 1, [](double t) {
    return Vec::Constant(1, 0.5 * t * t);
  });
  // int_0^1 (1 - sqrt(1 - t^2)) dt = 1 - pi/4.
  const double psi = energy_eval(s, u, EnergyMode::full()).psi;
  CHECK(psi == doctest::Approx(1.0 - oracle::kPi / 4.0).epsilon(1e-5));
}

TEST_CASE("smooth_gradient is the gradient of smooth_energy") {
  ProblemSpec s = base_spec(12, 2);
  s.potential = cosine_potential();
  s.h = [](double t) {
    Vec v(2);
    v << std::sin(3 * t), 0.5;
    return v;
  };
  GridFunction u = GridFunction::sample(s.grid, 2, [](double t) {
    Vec v(2);
    v << 0.3 * std::sin(2 * t), 0.2 * t * t - 0.1;
    return v;
  });
  for (const EnergyMode& mode : {EnergyMode::full(), EnergyMode::auxiliary(s.h_samples())}) {
    const GridFunction g = smooth_gradient(s, u, mode);
    const double h = 1e-6;
    for (int i = 0; i <= s.grid.M; ++i) {
      for (int c = 0; c < 2; ++c) {
        GridFunction up = u, um = u;
        up.values(i, c) += h;
        um.values(i, c) -= h;
        const double fd = (smooth_energy(s, up, mode) - smooth_energy(s, um, mode)) / (2 * h);
        CHECK(fd == doctest::Approx(g.values(i, c)).epsilon(1e-6).scale(1.0));
      }
    }
  }
}

TEST_CASE("infeasible curves: infinite energy, gradient throws") {
  ProblemSpec s = base_spec(10);
  const GridFunction u = GridFunction::sample(s.grid, 1, [](double t) {
    return Vec::Constant(1, 1.5 * t);
  });
  CHECK(std::isinf(smooth_energy(s, u, EnergyMode::full())));
  CHECK(std::isinf(energy_eval(s, u, EnergyMode::full()).total));
  CHECK_THROWS_AS(smooth_gradient(s, u, EnergyMode::full()), DomainError);
  CHECK_FALSE(feasible(u, s.phi, 0.0));
}

TEST_CASE("mean and oscillation decomposition") {
  ProblemSpec s = base_spec(100, 1);
  const GridFunction u = GridFunction::sample(s.grid, 1, [](double t) {
    return Vec::Constant(1, 2.0 + 0.1 * std::cos(2 * oracle::kPi * t));
  });
  const MeanOscillation mo = mean_oscillation(u);
  CHECK(mo.mean[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(mo.oscillation.sup_norm() == doctest::Approx(0.1).epsilon(1e-12));
  const Vec w = s.grid.weights();
  CHECK(std::abs(mo.oscillation.values.col(0).dot(w)) < 1e-13);
}

TEST_CASE("endpoint flux recoveries are consistent on an arbitrary smooth curve") {
  ProblemSpec s = base_spec(200);
  // u = t^2 / 4 does not solve the auxiliary equation, so the half-cell term is O(dt).
  const GridFunction u = GridFunction::sample(s.grid, 1, [](double t) {
    return Vec::Constant(1, 0.25 * t * t);
  });
  const oracle::Phi1D ref{};
  const NodeMat h = NodeMat::Zero(s.grid.M + 1, 1);
  const EndpointPair p = endpoint_fluxes(s, u, EnergyMode::auxiliary(h));
  const EndpointPair q = endpoint_fluxes(s, u, EnergyMode::auxiliary(h),
                                         FluxRecovery::QuadraticExtrapolation);
  CHECK(std::abs(p.x[0] - ref.phi(0.0)) < 5e-3);
  CHECK(std::abs(p.y[0] - ref.phi(0.5)) < 5e-3);
  CHECK(q.x[0] == doctest::Approx(ref.phi(0.0)).scale(1.0).epsilon(1e-5));
  CHECK(q.y[0] == doctest::Approx(ref.phi(0.5)).epsilon(1e-5));
}

TEST_CASE("lambda_1 matches a dense generalized eigensolve") {
  const int M = 60;
  const Grid g = Grid::make(1.0, M);
  struct Case {
    BoundaryFunctional j;
    std::string kind;
  };
  const Case cases[] = {{BoundaryFunctional::dirichlet(), "point"},
                        {BoundaryFunctional::neumann(), "free"},
                        {BoundaryFunctional::periodic(), "diagonal"},
                        {BoundaryFunctional::antiperiodic(), "anti"}};
  for (const Case& c : cases) {
    const double ref = oracle::lambda1_dense(1.0, M, oracle::endpoint_basis(M, c.kind));
    const double got = rayleigh_lambda1(c.j, g, 1);
    CHECK(got == doctest::Approx(ref).epsilon(1e-8).scale(1.0));
  }
  CHECK(rayleigh_lambda1(BoundaryFunctional::dirichlet(), Grid::make(2.0, 200), 1) ==
        doctest::Approx(oracle::kPi * oracle::kPi / 4.0).epsilon(0.02));
  CHECK_THROWS_AS(rayleigh_lambda1({ConvexSetK::strip(0.5), {}}, g, 1), UnsupportedError);
}
