#include <philap/problem.hpp>

#include <philap/errors.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace philap {

PotentialField PotentialField::zero() {
  PotentialField p;
  p.name = "zero";
  p.value = [](double, const Vec&) { return 0.0; };
  p.gradient = [](double, const Vec& u) { return Vec(Vec::Zero(u.size())); };
  p.hessian = [](double, const Vec& u) { return Mat(Mat::Zero(u.size(), u.size())); };
  return p;
}

Vec PotentialField::grad(double t, const Vec& u) const {
  if (gradient) return gradient(t, u);
  return Vec::Zero(u.size());
}

Mat PotentialField::hess(double t, const Vec& u) const {
  if (hessian) return hessian(t, u);
  const auto n = u.size();
  Mat H(n, n);
  const double h = 1e-6 * (1.0 + u.lpNorm<Eigen::Infinity>());
  for (Eigen::Index c = 0; c < n; ++c) {
    Vec up = u, um = u;
    up[c] += h;
    um[c] -= h;
    H.col(c) = (grad(t, up) - grad(t, um)) / (2.0 * h);
  }
  return 0.5 * (H + H.transpose());
}

NodeMat ProblemSpec::h_samples() const {
  NodeMat s = NodeMat::Zero(grid.M + 1, N);
  if (!h) return s;
  for (int i = 0; i <= grid.M; ++i) s.row(i) = h(grid.node(i)).transpose();
  return s;
}

ProblemSpec ProblemSpec::with_grid(int M) const {
  ProblemSpec s = *this;
  s.grid = Grid::make(grid.T, M);
  return s;
}

void ProblemSpec::validate(double tol) const {
  if (N < 1) throw DomainError("problem dimension N must be >= 1");
  if (periods) {
    if (periods->size() != N) throw DomainError("periods: expected one period per component");
    if ((periods->array() <= 0.0).any()) throw DomainError("periods must be positive");
  }
  const Vec zero = Vec::Zero(N);
  for (int k = 0; k <= 16; ++k) {
    const double t = grid.T * k / 16.0;
    const double f0 = potential.F(t, zero);
    if (std::abs(f0) > tol) {
      throw DomainError("potential '" + potential.name + "' violates F(t, 0) = 0 at t = " +
                        std::to_string(t));
    }
  }
  if (h && h_mean_zero) {
    const Vec w = grid.weights();
    const NodeMat hs = h_samples();
    const Vec integral = hs.transpose() * w;
    if (integral.norm() > tol * std::max(1.0, grid.T)) {
      throw DomainError("h is declared mean-zero but its integral is " +
                        std::to_string(integral.norm()));
    }
  }
}

}  // namespace philap
