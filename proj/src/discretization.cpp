#include <philap/discretization.hpp>

#include <philap/errors.hpp>
#include <philap/kernels.hpp>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace philap {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

NodeMat derivative(const GridFunction& u) {
  const int m = u.grid.M;
  return (u.values.bottomRows(m) - u.values.topRows(m)) / u.grid.dt();
}

double max_derivative_norm(const GridFunction& u) {
  return derivative(u).rowwise().norm().maxCoeff();
}

MeanOscillation mean_oscillation(const GridFunction& u) {
  const Vec w = u.grid.weights();
  const Vec mean = u.values.transpose() * w / u.grid.T;
  GridFunction osc = u;
  osc.values.rowwise() -= mean.transpose();
  return {mean, osc};
}

bool feasible(const GridFunction& u, const PhiMap& phi, double margin) {
  return max_derivative_norm(u) <= phi.radius() * (1.0 - margin);
}

NodeMat node_source(const ProblemSpec& spec, const GridFunction& u, const EnergyMode& mode) {
  if (mode.is_full()) return kernels::node_gradient(spec, u) + spec.h_samples();
  return mode.h - u.values;
}

double smooth_energy(const ProblemSpec& spec, const GridFunction& u, const EnergyMode& mode) {
  const NodeMat du = derivative(u);
  if (du.rowwise().norm().maxCoeff() > spec.phi.radius()) return kInf;
  const std::vector<double> pot = kernels::midpoint_potential(spec.phi, du);
  const double dt = u.grid.dt();
  const double phi0 = spec.phi.phi0_value();
  double psi = 0.0;
  for (double p : pot) psi += dt * (p - phi0);

  const Vec w = u.grid.weights();
  double node = 0.0;
  if (mode.is_full()) {
    const std::vector<double> F = kernels::node_potential(spec, u);
    const NodeMat h = spec.h_samples();
    for (int i = 0; i <= u.grid.M; ++i) {
      node -= w[i] * (F[static_cast<std::size_t>(i)] + h.row(i).dot(u.values.row(i)));
    }
  } else {
    for (int i = 0; i <= u.grid.M; ++i) {
      node += w[i] * (0.5 * u.values.row(i).squaredNorm() - mode.h.row(i).dot(u.values.row(i)));
    }
  }
  return psi + node;
}

EnergyBreakdown energy_eval(const ProblemSpec& spec, const GridFunction& u,
                            const EnergyMode& mode) {
  EnergyBreakdown e;
  const NodeMat du = derivative(u);
  if (du.rowwise().norm().maxCoeff() > spec.phi.radius()) {
    e.psi = kInf;
  } else {
    const std::vector<double> pot = kernels::midpoint_potential(spec.phi, du);
    const double phi0 = spec.phi.phi0_value();
    for (double p : pot) e.psi += u.grid.dt() * (p - phi0);
  }
  e.j_term = j_eval(spec.boundary, u.node(0), u.node(u.grid.M));

  const Vec w = u.grid.weights();
  if (mode.is_full()) {
    const std::vector<double> F = kernels::node_potential(spec, u);
    const NodeMat h = spec.h_samples();
    double f = 0.0;
    for (int i = 0; i <= u.grid.M; ++i) {
      f -= w[i] * (F[static_cast<std::size_t>(i)] + h.row(i).dot(u.values.row(i)));
    }
    e.f_term = f;
  } else {
    double q = 0.0;
    for (int i = 0; i <= u.grid.M; ++i) {
      q += w[i] * (0.5 * u.values.row(i).squaredNorm() - mode.h.row(i).dot(u.values.row(i)));
    }
    e.quad_term = q;
  }
  if (std::isinf(e.psi) || std::isinf(e.j_term)) {
    e.total = kInf;
  } else {
    e.total = e.psi + e.j_term + e.f_term + e.quad_term.value_or(0.0);
  }
  return e;
}

GridFunction smooth_gradient(const ProblemSpec& spec, const GridFunction& u,
                             const EnergyMode& mode) {
  const NodeMat du = derivative(u);
  if (du.rowwise().norm().maxCoeff() >= spec.phi.radius()) {
    throw DomainError("smooth_gradient: derivative leaves the open ball");
  }
  const NodeMat flux = kernels::midpoint_flux(spec.phi, du);
  const NodeMat src = node_source(spec, u, mode);
  const Vec w = u.grid.weights();
  const int m = u.grid.M;
  GridFunction g = GridFunction::zeros(u.grid, u.dim());
  for (int i = 0; i <= m; ++i) {
    if (i > 0) g.values.row(i) += flux.row(i - 1);
    if (i < m) g.values.row(i) -= flux.row(i);
    g.values.row(i) -= w[i] * src.row(i);
  }
  return g;
}

EndpointPair endpoint_fluxes(const ProblemSpec& spec, const GridFunction& u,
                             const EnergyMode& mode, FluxRecovery recovery) {
  const NodeMat du = derivative(u);
  const NodeMat flux = kernels::midpoint_flux(spec.phi, du);
  const int m = u.grid.M;
  if (recovery == FluxRecovery::QuadraticExtrapolation && m >= 3) {
    const Vec p0 = (15.0 * flux.row(0) - 10.0 * flux.row(1) + 3.0 * flux.row(2)).transpose() / 8.0;
    const Vec pT =
        (15.0 * flux.row(m - 1) - 10.0 * flux.row(m - 2) + 3.0 * flux.row(m - 3)).transpose() / 8.0;
    return {p0, pT};
  }
  const NodeMat src = node_source(spec, u, mode);
  const double half = 0.5 * u.grid.dt();
  return {(flux.row(0) + half * src.row(0)).transpose(),
          (flux.row(m - 1) - half * src.row(m)).transpose()};
}

double rayleigh_lambda1(const BoundaryFunctional& boundary, const Grid& grid, int /*N*/) {
  // Catalog sets act componentwise, so the scalar problem gives lambda_1 for every N.
  if (!boundary.set.is_linear()) {
    throw UnsupportedError("lambda_1 needs a linear admissible endpoint set");
  }
  const Eigen::Matrix2Xd b = boundary.set.basis();
  const int m = grid.M;
  const int k = static_cast<int>(b.cols());
  const int n = m - 1 + k;
  const double dt = grid.dt();
  const Vec w = grid.weights();

  // Each node is a linear combination of unknowns.
  auto expand = [&](int i) {
    std::vector<std::pair<int, double>> terms;
    if (i > 0 && i < m) {
      terms.emplace_back(i - 1, 1.0);
    } else {
      const int row = (i == 0) ? 0 : 1;
      for (int c = 0; c < k; ++c) {
        if (b(row, c) != 0.0) terms.emplace_back(m - 1 + c, b(row, c));
      }
    }
    return terms;
  };

  std::vector<Eigen::Triplet<double>> kt, wt;
  for (int i = 0; i < m; ++i) {
    const auto left = expand(i), right = expand(i + 1);
    auto add = [&](const auto& p, const auto& q, double s) {
      for (const auto& [r, a] : p)
        for (const auto& [c, bb] : q) kt.emplace_back(r, c, s * a * bb / dt);
    };
    add(left, left, 1.0);
    add(right, right, 1.0);
    add(left, right, -1.0);
    add(right, left, -1.0);
  }
  for (int i = 0; i <= m; ++i) {
    const auto terms = expand(i);
    for (const auto& [r, a] : terms)
      for (const auto& [c, bb] : terms) wt.emplace_back(r, c, w[i] * a * bb);
  }
  Eigen::SparseMatrix<double> K(n, n), W(n, n);
  K.setFromTriplets(kt.begin(), kt.end());
  W.setFromTriplets(wt.begin(), wt.end());

  // Inverse iteration with shift -1 (K + W is positive definite).
  Eigen::SparseMatrix<double> A = K + W;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
  if (solver.info() != Eigen::Success) throw ConvergenceError("lambda_1: factorization failed");

  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> unif(0.5, 1.5);
  Vec q(n);
  for (int i = 0; i < n; ++i) q[i] = unif(rng);
  double rq = kInf;
  for (int it = 0; it < 2000; ++it) {
    const Vec x = solver.solve(W * q);
    const double wn = std::sqrt(x.dot(W * x));
    q = x / wn;
    const double next = q.dot(K * q);
    if (std::abs(next - rq) <= 1e-15 * (1.0 + std::abs(next)) && it > 3) {
      rq = next;
      break;
    }
    rq = next;
  }
  return std::max(0.0, rq);
}

}  // namespace philap
