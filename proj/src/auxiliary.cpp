#include <philap/auxiliary.hpp>

#include <philap/detail/newton.hpp>
#include <philap/errors.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace philap {

namespace {

detail::NewtonOptions newton_options(const AuxiliaryOptions& opts) {
  detail::NewtonOptions n;
  n.tol = opts.newton_tol;
  n.max_iter = opts.outer_cap;
  n.margin = opts.margin;
  return n;
}

void check_h(const NodeMat& h, const Grid& grid) {
  if (h.rows() != grid.M + 1) throw DomainError("h samples do not match the grid");
}

// One Picard sweep: integrate the flux balance from t = 0 and fix u(0) by the mean identity.
NodeMat picard_map(const PhiMap& phi, const NodeMat& h, const Vec& x, const Vec& y,
                   const Grid& grid, const NodeMat& u) {
  const int m = grid.M;
  const auto n = u.cols();
  const double dt = grid.dt();
  const Vec w = grid.weights();
  NodeMat off = NodeMat::Zero(m + 1, n);
  Vec p = x + 0.5 * dt * (u.row(0) - h.row(0)).transpose();
  for (int k = 0; k < m; ++k) {
    if (k > 0) p += dt * (u.row(k) - h.row(k)).transpose();
    off.row(k + 1) = off.row(k) + dt * phi.inverse(p).transpose();
  }
  const Vec target = y - x + h.transpose() * w;
  const Vec u0 = (target - off.transpose() * w) / grid.T;
  off.rowwise() += u0.transpose();
  return off;
}

GridFunction neumann_picard(const PhiMap& phi, const NodeMat& h, const Vec& x, const Vec& y,
                            const Grid& grid, const AuxiliaryOptions& opts, int cap) {
  GridFunction u = GridFunction::zeros(grid, static_cast<int>(x.size()));
  double rho = opts.damping;
  double last = std::numeric_limits<double>::infinity();
  for (int it = 0; it < cap; ++it) {
    const NodeMat g = picard_map(phi, h, x, y, grid, u.values);
    const double r = (g - u.values).rowwise().norm().maxCoeff();
    if (r <= opts.picard_tol) {
      u.values = g;
      return u;
    }
    if (r > last) rho = std::max(opts.damping_floor, 0.5 * rho);
    last = r;
    u.values = (1.0 - rho) * u.values + rho * g;
  }
  throw ConvergenceError("solve_neumann: Picard iteration cap reached");
}

GridFunction neumann_newton(const PhiMap& phi, const NodeMat& h, const Vec& x, const Vec& y,
                            const Grid& grid, const AuxiliaryOptions& opts,
                            GridFunction start) {
  const int n = static_cast<int>(x.size());
  const ProblemSpec spec = auxiliary_spec(phi, BoundaryFunctional::neumann(), grid, n);
  detail::EndpointTerms ends;
  ends.j = BoundaryFunctional::neumann();
  ends.lin_x = x;
  ends.lin_y = -y;
  if (!feasible(start, phi, opts.margin)) start = GridFunction::zeros(grid, n);
  detail::NewtonResult r =
      detail::prox_newton(spec, EnergyMode::auxiliary(h), ends, std::move(start),
                          newton_options(opts));
  if (!r.converged) {
    std::ostringstream os;
    os << "solve_neumann: Newton stalled at residual " << r.residual;
    throw ConvergenceError(os.str());
  }
  return std::move(r.u);
}

}  // namespace

NodeMat sample_h(const Grid& grid, int N, const std::function<Vec(double)>& h) {
  NodeMat s = NodeMat::Zero(grid.M + 1, N);
  if (!h) return s;
  for (int i = 0; i <= grid.M; ++i) s.row(i) = h(grid.node(i)).transpose();
  return s;
}

ProblemSpec auxiliary_spec(const PhiMap& phi, const BoundaryFunctional& j, const Grid& grid,
                           int N) {
  ProblemSpec s;
  s.phi = phi;
  s.boundary = j;
  s.N = N;
  s.grid = grid;
  return s;
}

GridFunction solve_neumann(const PhiMap& phi, const NodeMat& h, const Vec& x, const Vec& y,
                           const Grid& grid, const AuxiliaryOptions& opts) {
  check_h(h, grid);
  GridFunction u;
  switch (opts.neumann_method) {
    case NeumannMethod::Picard:
      u = neumann_picard(phi, h, x, y, grid, opts, opts.inner_cap);
      break;
    case NeumannMethod::Newton:
      u = neumann_newton(phi, h, x, y, grid, opts, GridFunction::zeros(grid, static_cast<int>(x.size())));
      break;
    case NeumannMethod::Auto:
      try {
        u = neumann_picard(phi, h, x, y, grid, opts, std::min(opts.auto_picard_cap, opts.inner_cap));
      } catch (const ConvergenceError&) {
        u = neumann_newton(phi, h, x, y, grid, opts,
                           GridFunction::zeros(grid, static_cast<int>(x.size())));
      }
      break;
  }
  // Discrete mean identity: sum w u = y - x + sum w h.
  const Vec w = grid.weights();
  const Vec lhs = u.values.transpose() * w;
  const Vec rhs = y - x + h.transpose() * w;
  if ((lhs - rhs).norm() > 1e-8 * (1.0 + (y - x).norm())) {
    throw ConvergenceError("solve_neumann: mean identity violated");
  }
  return u;
}

DirichletResult solve_dirichlet(const PhiMap& phi, const NodeMat& h, const Vec& x, const Vec& y,
                                const Grid& grid, const AuxiliaryOptions& opts,
                                const GridFunction* warm) {
  check_h(h, grid);
  const double ta = grid.T * phi.radius();
  const double dist = (y - x).norm();
  if (dist >= ta * (1.0 - opts.margin)) return Infeasible{dist - ta};

  const int n = static_cast<int>(x.size());
  const int m = grid.M;
  GridFunction init = GridFunction::zeros(grid, n);
  auto straight = [&] {
    for (int i = 0; i <= m; ++i) {
      const double s = static_cast<double>(i) / m;
      init.values.row(i) = ((1.0 - s) * x + s * y).transpose();
    }
  };
  straight();
  if (warm && warm->values.rows() == m + 1 && warm->dim() == n) {
    GridFunction shifted = *warm;
    const Vec dx = x - warm->node(0), dy = y - warm->node(m);
    for (int i = 0; i <= m; ++i) {
      const double s = static_cast<double>(i) / m;
      shifted.values.row(i) += ((1.0 - s) * dx + s * dy).transpose();
    }
    shifted.values.row(0) = x.transpose();
    shifted.values.row(m) = y.transpose();
    if (feasible(shifted, phi, opts.margin)) init = std::move(shifted);
  }

  const ProblemSpec spec = auxiliary_spec(phi, BoundaryFunctional::dirichlet(), grid, n);
  detail::NewtonResult r = detail::prox_newton(spec, EnergyMode::auxiliary(h), {}, std::move(init),
                                               newton_options(opts));
  if (!r.converged) {
    std::ostringstream os;
    os << "solve_dirichlet: Newton stalled at residual " << r.residual;
    throw ConvergenceError(os.str());
  }
  return std::move(r.u);
}

ThetaEval theta_eval(const PhiMap& phi, const NodeMat& h, const Vec& x, const Vec& y,
                     const Grid& grid, const AuxiliaryOptions& opts, const GridFunction* warm) {
  DirichletResult d = solve_dirichlet(phi, h, x, y, grid, opts, warm);
  if (auto* inf = std::get_if<Infeasible>(&d)) {
    throw InfeasibleError("theta: endpoint pair outside D_{Ta}", inf->gap);
  }
  ThetaEval out;
  out.input = {x, y};
  out.u = std::move(std::get<GridFunction>(d));
  const int n = static_cast<int>(x.size());
  const ProblemSpec spec = auxiliary_spec(phi, BoundaryFunctional::dirichlet(), grid, n);
  const EnergyMode mode = EnergyMode::auxiliary(h);
  const EndpointPair p = endpoint_fluxes(spec, out.u, mode);
  out.theta = {-p.x, p.y};
  out.energy = smooth_energy(spec, out.u, mode);
  return out;
}

namespace {

EndpointPair scaled_start(const BoundaryFunctional& j, EndpointPair z, double ta) {
  z = project_K(j.set, z.x, z.y);
  const double d = (z.x - z.y).norm();
  if (d >= 0.9 * ta) {
    const double s = 0.5 * ta / d;
    z.x *= s;
    z.y *= s;
  }
  return z;
}

InclusionResult finish(const PhiMap& phi, const BoundaryFunctional& j, const NodeMat& h,
                       const Grid& grid, InclusionResult r) {
  const int n = r.u.dim();
  const ProblemSpec spec = auxiliary_spec(phi, j, grid, n);
  const EndpointPair p = endpoint_fluxes(spec, r.u, EnergyMode::auxiliary(h));
  r.endpoints = r.u.endpoints();
  r.flux_pair = {p.x, -p.y};
  r.inclusion_residual = subdifferential_distance(j, r.endpoints, r.flux_pair, 1e-8);
  const double scale = 1.0 + norm(r.flux_pair);
  if (r.inclusion_residual > 1e-6 * scale) {
    std::ostringstream os;
    os << "solve_P_partial_j: boundary inclusion residual " << r.inclusion_residual;
    throw ConvergenceError(os.str());
  }
  if (!((r.endpoints.x - r.endpoints.y).norm() < grid.T * phi.radius())) {
    throw ConvergenceError("solve_P_partial_j: endpoints left D_{Ta}");
  }
  return r;
}

}  // namespace

InclusionResult solve_P_partial_j(const PhiMap& phi, const BoundaryFunctional& j,
                                  const NodeMat& h, const Grid& grid,
                                  const AuxiliaryOptions& opts, std::optional<EndpointPair> start,
                                  const GridFunction* warm) {
  check_h(h, grid);
  const int n = static_cast<int>(h.cols());
  const double ta = grid.T * phi.radius();
  InclusionResult res;

  if (opts.inclusion_method == InclusionMethod::Energy) {
    const ProblemSpec spec = auxiliary_spec(phi, j, grid, n);
    GridFunction init = GridFunction::zeros(grid, n);
    if (warm && warm->values.rows() == grid.M + 1 && feasible(*warm, phi, opts.margin) &&
        in_set(j.set, warm->node(0), warm->node(grid.M), 1e-10)) {
      init = *warm;
    } else if (start) {
      const EndpointPair z = scaled_start(j, *start, ta);
      for (int i = 0; i <= grid.M; ++i) {
        const double s = static_cast<double>(i) / grid.M;
        init.values.row(i) = ((1.0 - s) * z.x + s * z.y).transpose();
      }
    }
    detail::EndpointTerms ends;
    ends.j = j;
    detail::NewtonResult r = detail::prox_newton(spec, EnergyMode::auxiliary(h), ends,
                                                 std::move(init), newton_options(opts));
    if (!r.converged) {
      std::ostringstream os;
      os << "solve_P_partial_j: Newton stalled at residual " << r.residual;
      throw ConvergenceError(os.str());
    }
    res.u = std::move(r.u);
    res.iterations = r.iterations;
    res.residual_history = {r.residual};
    return finish(phi, j, h, grid, std::move(res));
  }

  // Forward-backward splitting on the endpoint pair.
  EndpointPair z = scaled_start(j, start.value_or(EndpointPair::zero(n)), ta);
  if (warm && warm->values.rows() == grid.M + 1 && !start) {
    const EndpointPair wz = warm->endpoints();
    if (in_set(j.set, wz.x, wz.y, 1e-10) && (wz.x - wz.y).norm() < 0.99 * ta) z = wz;
  }
  ThetaEval cur = theta_eval(phi, h, z.x, z.y, grid, opts, warm);
  double lambda = 1.0;
  for (int outer = 0; outer < opts.outer_cap; ++outer) {
    bool accepted = false;
    ThetaEval next;
    EndpointPair wz;
    for (int bt = 0; bt < 80; ++bt) {
      wz = prox_j(j, z.x - lambda * cur.theta.x, z.y - lambda * cur.theta.y, lambda);
      if ((wz.x - wz.y).norm() >= ta * (1.0 - opts.margin)) {
        lambda *= 0.5;
        continue;
      }
      try {
        next = theta_eval(phi, h, wz.x, wz.y, grid, opts, &cur.u);
      } catch (const InfeasibleError&) {
        lambda *= 0.5;
        continue;
      }
      const EndpointPair dz{wz.x - z.x, wz.y - z.y};
      const double model = cur.energy + inner(cur.theta, dz) + inner(dz, dz) / (2.0 * lambda);
      // The gradient test stays meaningful once energy differences reach rounding level.
      const EndpointPair dtheta{next.theta.x - cur.theta.x, next.theta.y - cur.theta.y};
      if (next.energy <= model + 1e-14 * (1.0 + std::abs(cur.energy)) &&
          inner(dtheta, dz) <= inner(dz, dz) / lambda) {
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) throw ConvergenceError("solve_P_partial_j: step size collapsed");
    const EndpointPair dz{wz.x - z.x, wz.y - z.y};
    const double step = norm(dz) / lambda;
    res.residual_history.push_back(step);
    z = wz;
    cur = std::move(next);
    res.iterations = outer + 1;
    if (step <= opts.splitting_tol) {
      res.u = std::move(cur.u);
      return finish(phi, j, h, grid, std::move(res));
    }
    lambda *= 1.5;
  }
  throw ConvergenceError("solve_P_partial_j: outer iteration cap reached");
}

LambdaFixedPoint lambda_fixed_point(const PhiMap& phi, const NodeMat& h, const Vec& xi,
                                    const Vec& eta, const Grid& grid,
                                    const AuxiliaryOptions& opts) {
  check_h(h, grid);
  const Vec w = grid.weights();
  LambdaFixedPoint out;
  const double T = grid.T;
  out.q_bar = (xi.norm() + eta.norm() + (h.transpose() * w).norm() + T * T * phi.radius()) / T;

  EndpointPair z = EndpointPair::zero(static_cast<int>(xi.size()));
  double rho = opts.damping;
  double last = std::numeric_limits<double>::infinity();
  for (int it = 0; it < opts.outer_cap; ++it) {
    const GridFunction u = solve_neumann(phi, h, z.x - xi, eta - z.y, grid, opts);
    const EndpointPair lam = u.endpoints();
    const double r = std::max((lam.x - z.x).norm(), (lam.y - z.y).norm());
    out.iterations = it + 1;
    if (r <= 1e-11 * (1.0 + norm(z))) {
      out.z = lam;
      if (out.z.x.norm() + out.z.y.norm() > 2.0 * out.q_bar * (1.0 + 1e-9)) {
        throw ConvergenceError("lambda_fixed_point: a-priori bound violated");
      }
      return out;
    }
    if (r > last) rho = std::max(opts.damping_floor, 0.5 * rho);
    last = r;
    z.x = (1.0 - rho) * z.x + rho * lam.x;
    z.y = (1.0 - rho) * z.y + rho * lam.y;
  }
  throw ConvergenceError("lambda_fixed_point: iteration cap reached");
}

}  // namespace philap
