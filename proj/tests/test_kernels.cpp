#include <doctest.h>

#include <philap/errors.hpp>
#include <philap/kernels.hpp>

#include <random>

using namespace philap;

namespace {

ProblemSpec spec_with(int M, int N) {
  ProblemSpec s;
  s.phi = PhiMap::p_relativistic(3.0, 1.5);
  s.N = N;
  s.grid = Grid::make(2.0, M);
  s.potential.name = "test";
  s.potential.value = [](double t, const Vec& u) { return std::sin(t) * u.squaredNorm() + u.sum() * u.sum() * u.sum(); };
  s.potential.gradient = [](double t, const Vec& u) -> Vec {
    return 2.0 * std::sin(t) * u + Vec::Constant(u.size(), 3.0 * u.sum() * u.sum());
  };
  return s;
}

GridFunction random_feasible(const ProblemSpec& s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-0.5, 0.5);
  GridFunction u = GridFunction::zeros(s.grid, s.N);
  for (int i = 1; i <= s.grid.M; ++i) {
    for (int c = 0; c < s.N; ++c) u.values(i, c) = u.values(i - 1, c) + s.grid.dt() * d(rng);
  }
  return u;
}

}  // namespace

TEST_CASE("OpenMP kernels agree bitwise with the serial reference") {
  for (int M : {10, 300, 5000}) {
    for (int N : {1, 3}) {
      const ProblemSpec s = spec_with(M, N);
      const GridFunction u = random_feasible(s, 7 + M + N);
      const NodeMat du = derivative(u);
      CHECK(kernels::midpoint_flux(s.phi, du) == kernels::serial::midpoint_flux(s.phi, du));
      CHECK(kernels::midpoint_potential(s.phi, du) ==
            kernels::serial::midpoint_potential(s.phi, du));
      CHECK(kernels::midpoint_jacobian(s.phi, du) ==
            kernels::serial::midpoint_jacobian(s.phi, du));
      CHECK(kernels::node_potential(s, u) == kernels::serial::node_potential(s, u));
      CHECK(kernels::node_gradient(s, u) == kernels::serial::node_gradient(s, u));
      CHECK(kernels::node_hessian(s, u) == kernels::serial::node_hessian(s, u));
    }
  }
}

TEST_CASE("kernels match direct PhiMap evaluation") {
  const ProblemSpec s = spec_with(400, 2);
  const GridFunction u = random_feasible(s, 3);
  const NodeMat du = derivative(u);
  const NodeMat flux = kernels::midpoint_flux(s.phi, du);
  const std::vector<double> jac = kernels::midpoint_jacobian(s.phi, du);
  for (int i : {0, 17, 399}) {
    const Vec y = du.row(i).transpose();
    CHECK((flux.row(i).transpose() - s.phi.phi(y)).norm() < 1e-14);
    const Mat J = Eigen::Map<const Mat>(jac.data() + 4 * i, 2, 2);
    CHECK((J - s.phi.jacobian(y)).norm() < 1e-12);
  }
}

TEST_CASE("a failing evaluation propagates out of the parallel loop") {
  const ProblemSpec s = spec_with(1000, 1);
  GridFunction u = random_feasible(s, 1);
  u.values(600, 0) += 10.0;  // slope far outside the ball
  const NodeMat du = derivative(u);
  CHECK_THROWS_AS(kernels::midpoint_flux(s.phi, du), DomainError);
  CHECK_THROWS_AS(kernels::serial::midpoint_flux(s.phi, du), DomainError);
}
