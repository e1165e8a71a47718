#include <doctest.h>

#include "oracles.hpp"

#include <philap/auxiliary.hpp>
#include <philap/errors.hpp>

#include <random>

using namespace philap;

namespace {

Vec v1(double x) { return Vec::Constant(1, x); }

oracle::Vec column(const NodeMat& h) { return h.col(0); }

NodeMat forcing(const Grid& g) {
  return sample_h(g, 1, [](double t) { return v1(0.4 * std::sin(5 * t) + 0.2); });
}

}  // namespace

TEST_CASE("Neumann solver matches the dense collocation oracle") {
  const Grid g = Grid::make(1.0, 120);
  const NodeMat h = forcing(g);
  struct Case {
    PhiMap phi;
    oracle::Phi1D ref;
  };
  const Case cases[] = {{PhiMap::relativistic(), {1.0}},
                        {PhiMap::p_relativistic(3.0), {1.0, 3.0, false}},
                        {PhiMap::relativistic(0.5), {0.5}}};
  for (const Case& c : cases) {
    for (auto method : {NeumannMethod::Picard, NeumannMethod::Newton, NeumannMethod::Auto}) {
      AuxiliaryOptions o;
      o.neumann_method = method;
      const GridFunction u = solve_neumann(c.phi, h, v1(0.3), v1(-0.7), g, o);
      const oracle::Vec ref =
          oracle::collocation(c.ref, column(h), 1.0, oracle::Bc::Neumann, 0.3, -0.7);
      CHECK((u.values.col(0) - ref).lpNorm<Eigen::Infinity>() < 1e-9);
    }
  }
}

TEST_CASE("Neumann with constant forcing and zero fluxes returns the constant") {
  const Grid g = Grid::make(2.0, 50);
  const NodeMat h = NodeMat::Constant(51, 1, 1.7);
  const GridFunction u = solve_neumann(PhiMap::relativistic(), h, v1(0), v1(0), g);
  CHECK((u.values.array() - 1.7).abs().maxCoeff() < 1e-12);
}

TEST_CASE("manufactured Neumann problem converges at second order") {
  const PhiMap phi = PhiMap::relativistic();
  const oracle::Phi1D ref{};
  auto us = [](double t) { return 0.04 * std::sin(2 * oracle::kPi * t) + 0.1 * t * t; };
  auto dus = [](double t) { return 0.08 * oracle::kPi * std::cos(2 * oracle::kPi * t) + 0.2 * t; };
  auto ddus = [](double t) { return -0.16 * oracle::kPi * oracle::kPi * std::sin(2 * oracle::kPi * t) + 0.2; };
  std::vector<double> err;
  for (int M : {100, 200, 400}) {
    const Grid g = Grid::make(1.0, M);
    const NodeMat h = sample_h(g, 1, [&](double t) {
      return v1(-ref.dphi(dus(t)) * ddus(t) + us(t));
    });
    const GridFunction u = solve_neumann(phi, h, v1(ref.phi(dus(0))), v1(ref.phi(dus(1))), g);
    double e = 0.0;
    for (int i = 0; i <= M; ++i) e = std::max(e, std::abs(u.values(i, 0) - us(g.node(i))));
    err.push_back(e);
  }
  CHECK(err[2] <= 1e-3);
  CHECK(err[0] / err[1] >= 3.5);
  CHECK(err[1] / err[2] >= 3.5);
}

TEST_CASE("Dirichlet solver: oracle agreement, infeasibility and warm start") {
  const Grid g = Grid::make(1.0, 100);
  const NodeMat h = forcing(g);
  const PhiMap phi = PhiMap::relativistic();
  const DirichletResult r = solve_dirichlet(phi, h, v1(0.1), v1(0.8), g);
  REQUIRE(std::holds_alternative<GridFunction>(r));
  const GridFunction& u = std::get<GridFunction>(r);
  const oracle::Vec ref = oracle::collocation({1.0}, column(h), 1.0, oracle::Bc::Dirichlet, 0.1, 0.8);
  CHECK((u.values.col(0) - ref).lpNorm<Eigen::Infinity>() < 1e-9);

  const DirichletResult bad = solve_dirichlet(phi, h, v1(0.0), v1(1.1), g);
  REQUIRE(std::holds_alternative<Infeasible>(bad));
  CHECK(std::get<Infeasible>(bad).gap == doctest::Approx(0.1));
  CHECK(std::holds_alternative<Infeasible>(solve_dirichlet(phi, h, v1(0.0), v1(1.0), g)));

  const DirichletResult warm = solve_dirichlet(phi, h, v1(0.12), v1(0.79), g, {}, &u);
  REQUIRE(std::holds_alternative<GridFunction>(warm));
  const oracle::Vec ref2 =
      oracle::collocation({1.0}, column(h), 1.0, oracle::Bc::Dirichlet, 0.12, 0.79);
  CHECK((std::get<GridFunction>(warm).values.col(0) - ref2).lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("theta is the gradient of the reduced energy") {
  const Grid g = Grid::make(1.0, 80);
  const NodeMat h = forcing(g);
  const PhiMap phi = PhiMap::p_relativistic(3.0);
  const double x = 0.2, y = -0.3, d = 1e-6;
  const ThetaEval t = theta_eval(phi, h, v1(x), v1(y), g);
  auto E = [&](double a, double b) { return theta_eval(phi, h, v1(a), v1(b), g).energy; };
  CHECK((E(x + d, y) - E(x - d, y)) / (2 * d) == doctest::Approx(t.theta.x[0]).epsilon(1e-5));
  CHECK((E(x, y + d) - E(x, y - d)) / (2 * d) == doctest::Approx(t.theta.y[0]).epsilon(1e-5));
  CHECK_THROWS_AS(theta_eval(phi, h, v1(0.0), v1(1.5), g), InfeasibleError);
}

TEST_CASE("theta is monotone on sampled pairs") {
  const Grid g = Grid::make(1.0, 60);
  const NodeMat h = forcing(g);
  const PhiMap phi = PhiMap::relativistic();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> c(-2.0, 2.0), dd(-0.45, 0.45);
  for (int s = 0; s < 20; ++s) {
    const double c1 = c(rng), d1 = dd(rng), c2 = c(rng), d2 = dd(rng);
    const ThetaEval p = theta_eval(phi, h, v1(c1 + d1), v1(c1 - d1), g);
    const ThetaEval q = theta_eval(phi, h, v1(c2 + d2), v1(c2 - d2), g);
    const double ip = (p.theta.x - q.theta.x).dot(p.input.x - q.input.x) +
                      (p.theta.y - q.theta.y).dot(p.input.y - q.input.y);
    CHECK(ip >= -1e-7);
  }
}

TEST_CASE("boundary inclusion solver") {
  const Grid g = Grid::make(1.0, 100);
  const NodeMat h = forcing(g);
  const PhiMap phi = PhiMap::relativistic();

  SUBCASE("periodic agrees with the collocation oracle for both methods") {
    const oracle::Vec ref = oracle::collocation({1.0}, column(h), 1.0, oracle::Bc::Periodic, 0, 0);
    for (auto m : {InclusionMethod::Splitting, InclusionMethod::Energy}) {
      AuxiliaryOptions o;
      o.inclusion_method = m;
      const InclusionResult r = solve_P_partial_j(phi, BoundaryFunctional::periodic(), h, g, o);
      CHECK((r.u.values.col(0) - ref).lpNorm<Eigen::Infinity>() < 1e-8);
      CHECK(r.inclusion_residual <= 1e-6 * (1.0 + norm(r.flux_pair)));
    }
  }
  SUBCASE("Neumann j = 0 with constant forcing returns the constant") {
    const NodeMat c = NodeMat::Constant(101, 1, -0.6);
    const InclusionResult r = solve_P_partial_j(phi, BoundaryFunctional::neumann(), c, g);
    CHECK((r.u.values.array() + 0.6).abs().maxCoeff() < 1e-9);
    CHECK(norm(r.flux_pair) < 1e-9);
  }
  SUBCASE("strip with exp coupling: both methods agree and the endpoints stay in K") {
    const BoundaryFunctional j{ConvexSetK::strip(0.05), SmoothPart::exp_difference()};
    const NodeMat hs = sample_h(g, 1, [](double t) { return v1(3.0 * t); });
    AuxiliaryOptions a, b;
    b.inclusion_method = InclusionMethod::Energy;
    const InclusionResult ra = solve_P_partial_j(phi, j, hs, g, a);
    const InclusionResult rb = solve_P_partial_j(phi, j, hs, g, b);
    CHECK(sup_distance(ra.u, rb.u) < 1e-6);
    CHECK(std::abs(ra.endpoints.x[0] - ra.endpoints.y[0]) <= 0.05 + 1e-9);
  }
  SUBCASE("Dirichlet j pins the endpoints at zero") {
    const InclusionResult r = solve_P_partial_j(phi, BoundaryFunctional::dirichlet(), h, g);
    CHECK(r.endpoints.x.norm() < 1e-14);
    CHECK(r.endpoints.y.norm() < 1e-14);
  }
}

TEST_CASE("lambda fixed point satisfies its defining identity and bound") {
  const Grid g = Grid::make(1.0, 80);
  const NodeMat h = forcing(g);
  const PhiMap phi = PhiMap::relativistic();
  const Vec xi = v1(0.4), eta = v1(-0.9);
  const LambdaFixedPoint f = lambda_fixed_point(phi, h, xi, eta, g);
  const GridFunction u = solve_neumann(phi, h, f.z.x - xi, eta - f.z.y, g);
  CHECK((u.node(0) - f.z.x).norm() < 1e-9);
  CHECK((u.node(g.M) - f.z.y).norm() < 1e-9);
  CHECK(f.z.x.norm() + f.z.y.norm() <= 2 * f.q_bar);
}
