#include <philap/detail/newton.hpp>

#include <philap/detail/block_tridiag.hpp>
#include <philap/errors.hpp>
#include <philap/kernels.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace philap::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Linearization {
  NodeMat grad;                 // (M+1) x N
  std::vector<double> jac;      // M blocks
  std::vector<double> node_hess;  // M+1 blocks (Hessian of the node term, before weights)
};

NodeMat energy_gradient(const ProblemSpec& spec, const EnergyMode& mode, const EndpointTerms& ends,
                        const GridFunction& u, const NodeMat& flux) {
  const int m = u.grid.M;
  const Vec w = u.grid.weights();
  const NodeMat src = node_source(spec, u, mode);
  NodeMat g(m + 1, u.dim());
  for (int i = 0; i <= m; ++i) {
    g.row(i) = -w[i] * src.row(i);
    if (i > 0) g.row(i) += flux.row(i - 1);
    if (i < m) g.row(i) -= flux.row(i);
  }
  if (ends.lin_x.size() > 0) g.row(0) += ends.lin_x.transpose();
  if (ends.lin_y.size() > 0) g.row(m) += ends.lin_y.transpose();
  return g;
}

double total_energy(const ProblemSpec& spec, const EnergyMode& mode, const EndpointTerms& ends,
                    const GridFunction& u) {
  double e = smooth_energy(spec, u, mode);
  if (!std::isfinite(e)) return kInf;
  const int m = u.grid.M;
  if (ends.lin_x.size() > 0) e += ends.lin_x.dot(u.values.row(0).transpose());
  if (ends.lin_y.size() > 0) e += ends.lin_y.dot(u.values.row(m).transpose());
  if (ends.j) e += j_eval(*ends.j, u.node(0), u.node(m), 1e-10);
  return e;
}

double residual_from_gradient(const EndpointTerms& ends, const GridFunction& u, const NodeMat& g) {
  const int m = u.grid.M;
  const double dt = u.grid.dt();
  double r = 0.0;
  for (int i = 1; i < m; ++i) r = std::max(r, g.row(i).norm() / dt);
  if (ends.j) {
    const Vec x = u.node(0), y = u.node(m);
    const EndpointPair p = prox_j(*ends.j, x - g.row(0).transpose(), y - g.row(m).transpose(), 1.0);
    r = std::max({r, (x - p.x).norm(), (y - p.y).norm()});
  }
  return r;
}

// Size of the residual that rounding of the node values alone produces.
double rounding_floor(const GridFunction& u, const NodeMat& flux, const std::vector<double>& jac) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double dt = u.grid.dt();
  double jmax = 0.0;
  for (double v : jac) jmax = std::max(jmax, std::abs(v));
  const double fmax = flux.size() ? flux.cwiseAbs().maxCoeff() : 0.0;
  return 4.0 * eps * ((1.0 + u.values.cwiseAbs().maxCoeff()) * jmax / (dt * dt) + fmax / dt);
}

Mat block(const std::vector<double>& data, int k, int n) {
  return Eigen::Map<const Mat>(data.data() + static_cast<std::size_t>(k) * n * n, n, n);
}

}  // namespace

double stationarity_residual(const ProblemSpec& spec, const EnergyMode& mode,
                             const EndpointTerms& ends, const GridFunction& u) {
  const NodeMat flux = kernels::midpoint_flux(spec.phi, derivative(u));
  return residual_from_gradient(ends, u, energy_gradient(spec, mode, ends, u, flux));
}

NewtonResult prox_newton(const ProblemSpec& spec, const EnergyMode& mode,
                         const EndpointTerms& ends, GridFunction init, const NewtonOptions& opts) {
  const int m = init.grid.M;
  const int n = init.dim();
  const double dt = init.grid.dt();
  const Vec w = init.grid.weights();
  const double cap_margin = opts.margin;

  if (!feasible(init, spec.phi, cap_margin)) {
    throw DomainError("prox_newton: initial curve violates the derivative cap");
  }
  if (ends.j && !in_set(ends.j->set, init.node(0), init.node(m), 1e-10)) {
    throw DomainError("prox_newton: initial endpoints outside the boundary set");
  }

  NewtonResult res;
  res.u = std::move(init);
  GridFunction& u = res.u;
  double energy = total_energy(spec, mode, ends, u);
  res.energy_trace.push_back(energy);
  double mu = 0.0;
  double previous = kInf;

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    const NodeMat du = derivative(u);
    const NodeMat flux = kernels::midpoint_flux(spec.phi, du);
    const std::vector<double> jac = kernels::midpoint_jacobian(spec.phi, du);
    const NodeMat grad = energy_gradient(spec, mode, ends, u, flux);
    res.residual = residual_from_gradient(ends, u, grad);
    res.iterations = iter;
    res.floor = rounding_floor(u, flux, jac);
    // Below the rounding floor, stop once Newton steps no longer halve the residual.
    const bool stalled = res.residual <= res.floor && res.residual > 0.5 * previous;
    previous = std::min(previous, res.residual);
    if (res.residual <= opts.tol || stalled) {
      res.converged = true;
      return res;
    }
    std::vector<double> node_hess;
    if (mode.is_full()) {
      node_hess = kernels::node_hessian(spec, u);
      for (double& v : node_hess) v = -v;
    }

    bool stepped = false;
    for (int attempt = 0; attempt < 40 && !stepped; ++attempt) {
      // Hessian blocks with Levenberg-Marquardt shift mu * w_i.
      auto node_block = [&](int i) {
        Mat D = mode.is_full() ? Mat(w[i] * block(node_hess, i, n))
                               : Mat(w[i] * Mat::Identity(n, n));
        D.diagonal().array() += mu * w[i];
        if (i > 0) D += block(jac, i - 1, n) / dt;
        if (i < m) D += block(jac, i, n) / dt;
        return D;
      };
      BlockTridiag interior;
      interior.diag.reserve(static_cast<std::size_t>(m - 1));
      for (int i = 1; i < m; ++i) interior.diag.push_back(node_block(i));
      for (int i = 1; i + 1 < m; ++i) interior.off.push_back(-block(jac, i, n) / dt);

      BlockTridiagSolver solver;
      const bool pd = solver.factor(interior);
      auto bump = [&] { mu = std::max(1e-8, 10.0 * mu); };
      if (!pd) {
        bump();
        continue;
      }

      const int ni = (m - 1) * n;
      Mat rhs = Mat::Zero(ni, 1 + 2 * n);
      for (int i = 1; i < m; ++i) rhs.block((i - 1) * n, 0, n, 1) = grad.row(i).transpose();
      rhs.block(0, 1, n, n) = -block(jac, 0, n) / dt;
      rhs.block((m - 2) * n, 1 + n, n, n) = -block(jac, m - 1, n) / dt;
      const Mat X = solver.solve(rhs);
      const Mat C = rhs.rightCols(2 * n);
      const Vec xg = X.col(0);
      const Mat xc = X.rightCols(2 * n);

      Vec dB = Vec::Zero(2 * n);
      double j_new = 0.0, j_old = 0.0;
      if (ends.j) {
        Mat S = Mat::Zero(2 * n, 2 * n);
        S.topLeftCorner(n, n) = node_block(0);
        S.bottomRightCorner(n, n) = node_block(m);
        S -= C.transpose() * xc;
        S = 0.5 * (S + S.transpose()).eval();
        Vec gB(2 * n);
        gB << grad.row(0).transpose(), grad.row(m).transpose();
        gB -= C.transpose() * xg;
        Eigen::LLT<Mat> llt(S);
        if (llt.info() != Eigen::Success) {
          bump();
          continue;
        }
        EndpointPair z{u.node(0), u.node(m)};
        const Vec center = z.stacked() - llt.solve(gB);
        const EndpointPair zp = prox_metric(*ends.j, EndpointPair::from_stacked(center), S);
        dB = zp.stacked() - z.stacked();
        j_old = j_eval(*ends.j, z.x, z.y, 1e-10);
        j_new = j_eval(*ends.j, zp.x, zp.y, 1e-10);
      }
      const Vec dI = -xg - xc * dB;

      NodeMat d(m + 1, n);
      d.row(0) = dB.head(n).transpose();
      d.row(m) = dB.tail(n).transpose();
      for (int i = 1; i < m; ++i) d.row(i) = dI.segment((i - 1) * n, n).transpose();

      double decrement = (grad.array() * d.array()).sum();
      if (ends.j) decrement += j_new - j_old;
      if (!(decrement < 0.0)) break;  // numerically stationary for this model

      double alpha = 1.0;
      for (int ls = 0; ls < 50; ++ls) {
        GridFunction trial = u;
        trial.values += alpha * d;
        if (feasible(trial, spec.phi, cap_margin)) {
          const double e_trial = total_energy(spec, mode, ends, trial);
          bool accept = std::isfinite(e_trial) && e_trial <= energy + 1e-4 * alpha * decrement;
          if (!accept && std::isfinite(e_trial) &&
              std::abs(e_trial - energy) <= 1e-13 * (1.0 + std::abs(energy))) {
            // Energy differences below rounding: accept if stationarity improves.
            accept = stationarity_residual(spec, mode, ends, trial) < res.residual;
          }
          if (accept) {
            u = std::move(trial);
            energy = std::min(energy, e_trial);
            res.energy_trace.push_back(e_trial);
            stepped = true;
            break;
          }
        }
        alpha *= 0.5;
      }
      if (stepped) {
        mu = (mu < 1e-9) ? 0.0 : 0.1 * mu;
      } else {
        bump();
        if (mu > 1e12) break;
      }
    }
    if (!stepped) break;
  }
  const NodeMat du = derivative(u);
  const NodeMat flux = kernels::midpoint_flux(spec.phi, du);
  res.residual = residual_from_gradient(ends, u, energy_gradient(spec, mode, ends, u, flux));
  res.floor = rounding_floor(u, flux, kernels::midpoint_jacobian(spec.phi, du));
  res.converged = res.residual <= std::max(opts.tol, res.floor);
  return res;
}

}  // namespace philap::detail
