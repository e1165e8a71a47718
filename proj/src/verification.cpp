#include <philap/verification.hpp>

#include <philap/errors.hpp>
#include <philap/kernels.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace philap {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kProbeSeed = 0x5eed;
constexpr int kProbeCount = 64;
}  // namespace

std::string to_string(NamedCheck::Status s) {
  switch (s) {
    case NamedCheck::Status::Pass: return "pass";
    case NamedCheck::Status::Fail: return "fail";
    case NamedCheck::Status::Skipped: return "skipped";
  }
  return "?";
}

EnergyMode mode_for(const ProblemSpec& spec, EnergyMode::Kind kind) {
  if (kind == EnergyMode::Kind::Full) return EnergyMode::full();
  return EnergyMode::auxiliary(spec.h_samples());
}

double ode_residual(const ProblemSpec& spec, const GridFunction& u, const EnergyMode& mode) {
  const NodeMat du = derivative(u);
  if (du.rowwise().norm().maxCoeff() >= spec.phi.radius()) return kInf;
  const NodeMat flux = kernels::midpoint_flux(spec.phi, du);
  const NodeMat src = node_source(spec, u, mode);
  const double dt = u.grid.dt();
  double r = 0.0;
  for (int i = 1; i < u.grid.M; ++i) {
    r = std::max(r, (-(flux.row(i) - flux.row(i - 1)) / dt - src.row(i)).norm());
  }
  return r;
}

std::optional<StripBranches> strip_branches(const ProblemSpec& spec, const GridFunction& u,
                                            const EnergyMode& mode, double tol) {
  const ConvexSetK& set = spec.boundary.set;
  if (set.kind != SetKind::Strip) return std::nullopt;
  const double sigma = set.sigma;
  const double ta = spec.grid.T * spec.phi.radius();
  const EndpointPair z = u.endpoints();
  const EndpointPair p = endpoint_fluxes(spec, u, mode);
  const EndpointPair gg = spec.boundary.g.gradient(z.x, z.y);
  const Vec d = z.x - z.y;
  const double nd = d.norm();
  const Vec r0 = p.x - gg.x;  // phi(u')(0) - grad_x g
  const Vec rT = p.y + gg.y;  // phi(u')(T) + grad_y g
  const double ftol = tol * (1.0 + p.x.norm() + p.y.norm());

  StripBranches b;
  const double steklov_mismatch = std::max(r0.norm(), rT.norm());
  double contact_mismatch = kInf;
  if (sigma == 0.0) {
    // Periodic-Steklov: u(0) = u(T) and r0 = rT.
    contact_mismatch = (r0 - rT).norm();
    b.contact = nd <= tol && contact_mismatch <= ftol;
  } else if (sigma >= ta * (1.0 - 1e-6)) {
    // The strip never binds: only the Neumann-Steklov branch is possible.
    b.steklov = steklov_mismatch <= ftol;
  } else {
    b.steklov = nd < sigma - tol && steklov_mismatch <= ftol;
    if (nd > 0.0) {
      b.s = (r0 + rT).dot(d) / (2.0 * nd * nd);
      contact_mismatch = (r0 - b.s * d).norm() + (rT - b.s * d).norm();
      b.contact = std::abs(nd - sigma) <= tol && b.s >= -tol && contact_mismatch <= ftol;
    }
  }
  b.mismatch = b.contact ? contact_mismatch
                         : (b.steklov ? steklov_mismatch : std::min(steklov_mismatch, contact_mismatch));
  return b;
}

std::vector<NamedCheck> invariant_suite(const ProblemSpec& spec, const GridFunction& u) {
  using S = NamedCheck::Status;
  constexpr double slack = 1e-6;
  std::vector<NamedCheck> out;
  const double T = spec.grid.T, a = spec.phi.radius();
  const Vec w = u.grid.weights();
  const NodeMat du = derivative(u);
  const double max_du = du.rowwise().norm().maxCoeff();
  const double sup_u = u.sup_norm();
  const double l2 = std::sqrt((u.values.rowwise().squaredNorm().transpose() * w).sum());
  auto check = [&](std::string name, double value, double bound) {
    out.push_back({std::move(name), value <= bound ? S::Pass : S::Fail, value, bound, ""});
  };
  auto skip = [&](std::string name, std::string why) {
    out.push_back({std::move(name), S::Skipped, 0.0, 0.0, std::move(why)});
  };

  check("l2_pointwise", sup_u, l2 / std::sqrt(T) + T * a + slack);

  const MeanOscillation mo = mean_oscillation(u);
  check("oscillation", mo.oscillation.sup_norm(), T * std::sqrt(double(u.dim())) * max_du + slack);

  double path = 0.0;
  for (int i = 0; i < u.grid.M; ++i) path += du.row(i).norm() * u.grid.dt();
  const double span = (u.node(u.grid.M) - u.node(0)).norm();
  check("strip", std::max(span, path), T * a + slack);

  const bool admissible = std::isfinite(j_eval(spec.boundary, u.node(0), u.node(u.grid.M), 1e-9));
  if (!spec.boundary.set.is_linear()) {
    skip("lambda1_bound", "admissible endpoint set is not a subspace");
  } else if (!admissible) {
    skip("lambda1_bound", "endpoints outside D(j)");
  } else {
    const double l1 = rayleigh_lambda1(spec.boundary, spec.grid, spec.N);
    if (l1 <= 1e-10) {
      skip("lambda1_bound", "lambda_1 = 0");
    } else {
      check("lambda1_bound", sup_u, a * (1.0 / std::sqrt(l1) + T) + slack);
    }
  }

  const auto [p1, p2] = projections_bounded(spec.boundary);
  if (p1 || p2) {
    // Catalog sets with a bounded projection have that projection equal to {0}.
    check("bounded_projection", mo.mean.norm(), T * a + slack);
  } else {
    skip("bounded_projection", "both endpoint projections unbounded");
  }

  bool periodic = false;
  if (spec.periods) {
    try {
      periodic = shift_invariant_diagonal(spec.boundary);
    } catch (const UnsupportedError&) {
      periodic = false;
    }
  }
  if (periodic) {
    Vec reduced = mo.mean;
    for (int k = 0; k < reduced.size(); ++k) {
      const double om = (*spec.periods)[k];
      reduced[k] -= std::floor(reduced[k] / om) * om;
    }
    check("periodic_reduced_mean", reduced.norm(),
          spec.periods->lpNorm<Eigen::Infinity>() * std::sqrt(double(u.dim())) + slack);
  } else {
    skip("periodic_reduced_mean", "no periodic reduction for this problem");
  }
  return out;
}

SolveReport check_solution(const ProblemSpec& spec, const GridFunction& u,
                           const EnergyMode& mode) {
  SolveReport r;
  r.mode = mode.is_full() ? "full" : "auxiliary";
  const double a = spec.phi.radius();
  const double max_du = max_derivative_norm(u);
  r.feasibility_margin = a - max_du;
  const EndpointPair z = u.endpoints();
  r.strip_gap = spec.grid.T * a - (z.x - z.y).norm();
  r.strip_ok = r.strip_gap > 0.0;
  r.energy = energy_eval(spec, u, mode);
  r.apriori_checks = invariant_suite(spec, u);
  if (!(max_du < a)) {
    r.ode_residual = kInf;
    r.boundary_residual = kInf;
    r.boundary_distance = kInf;
    r.boundary_tolerance = 0.0;
    return r;
  }
  r.ode_residual = ode_residual(spec, u, mode);
  const EndpointPair p = endpoint_fluxes(spec, u, mode);
  r.flux_pair = {p.x, -p.y};
  r.boundary_tolerance = 1e-6 * (1.0 + norm(r.flux_pair));
  if (std::isfinite(j_eval(spec.boundary, z.x, z.y, 1e-9))) {
    r.boundary_residual =
        subdifferential_residual(spec.boundary, z, r.flux_pair, 1.0, kProbeCount, kProbeSeed);
    try {
      r.boundary_distance = subdifferential_distance(spec.boundary, z, r.flux_pair, 1e-8);
    } catch (const DomainError&) {
      r.boundary_distance = kInf;
    }
  } else {
    r.boundary_residual = kInf;
    r.boundary_distance = kInf;
  }
  r.boundary_ok = r.boundary_residual <= r.boundary_tolerance &&
                  r.boundary_distance <= r.boundary_tolerance;
  r.strip_branches = strip_branches(spec, u, mode);
  return r;
}

std::vector<RefineRow> refine_study(const ProblemSpec& spec, const GridSolver& solver,
                                    const std::vector<int>& levels, EnergyMode::Kind kind,
                                    const std::function<Vec(double)>& exact) {
  if (levels.empty()) return {};
  for (std::size_t k = 1; k < levels.size(); ++k) {
    if (levels[k] <= levels[k - 1]) throw DomainError("refine_study: levels must increase");
  }
  std::vector<GridFunction> sols;
  std::vector<RefineRow> rows;
  for (int M : levels) {
    const ProblemSpec s = spec.with_grid(M);
    GridFunction u = solver(s);
    const SolveReport rep = check_solution(s, u, mode_for(s, kind));
    rows.push_back({M, rep.ode_residual, rep.boundary_distance, 0.0, std::nullopt});
    sols.push_back(std::move(u));
  }
  const GridFunction& finest = sols.back();
  for (std::size_t k = 0; k < sols.size(); ++k) {
    const GridFunction& u = sols[k];
    double err = 0.0;
    if (exact) {
      for (int i = 0; i <= u.grid.M; ++i) {
        err = std::max(err, (u.node(i) - exact(u.grid.node(i))).norm());
      }
    } else {
      const int fm = finest.grid.M;
      if (fm % u.grid.M != 0) throw DomainError("refine_study: levels must nest");
      const int stride = fm / u.grid.M;
      for (int i = 0; i <= u.grid.M; ++i) {
        err = std::max(err, (u.node(i) - finest.node(i * stride)).norm());
      }
    }
    rows[k].error = err;
    if (k > 0 && err > 0.0) rows[k].ratio = rows[k - 1].error / err;
  }
  return rows;
}

std::vector<GridFunction> sample_admissible(const ProblemSpec& spec, const GridFunction& u,
                                            int count, std::uint64_t seed, double margin) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const int m = u.grid.M, n = u.dim();
  const double T = u.grid.T;
  const double pi = std::acos(-1.0);
  std::vector<GridFunction> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double scale = std::pow(10.0, -(k % 4)) * (1.0 + u.sup_norm());
    Mat coef(n, 6);
    for (int c = 0; c < n; ++c)
      for (int q = 0; q < 6; ++q) coef(c, q) = unif(rng);
    GridFunction v = u;
    for (int i = 0; i <= m; ++i) {
      const double t = u.grid.node(i) / T;
      for (int c = 0; c < n; ++c) {
        double p = coef(c, 0) + coef(c, 1) * t;
        for (int q = 2; q < 6; ++q) p += coef(c, q) * std::sin((q - 1) * pi * t) / (q - 1);
        v.values(i, c) += scale * p;
      }
    }
    const EndpointPair e = project_K(spec.boundary.set, v.node(0), v.node(m));
    v.values.row(0) = e.x.transpose();
    v.values.row(m) = e.y.transpose();
    bool ok = false;
    for (int h = 0; h < 80; ++h) {
      if (feasible(v, spec.phi, margin)) {
        ok = true;
        break;
      }
      v.values = u.values + 0.5 * (v.values - u.values);
    }
    if (ok) out.push_back(std::move(v));
  }
  return out;
}

double variational_inequality(const ProblemSpec& spec, const EnergyMode& mode,
                              const GridFunction& u, const GridFunction& v) {
  const EnergyBreakdown eu = energy_eval(spec, u, mode);
  const EnergyBreakdown ev = energy_eval(spec, v, mode);
  if (!std::isfinite(ev.psi) || !std::isfinite(ev.j_term)) return kInf;
  const NodeMat src = node_source(spec, u, mode);
  const Vec w = u.grid.weights();
  double lin = 0.0;
  for (int i = 0; i <= u.grid.M; ++i) {
    lin += w[i] * src.row(i).dot(v.values.row(i) - u.values.row(i));
  }
  return (ev.psi - eu.psi) + (ev.j_term - eu.j_term) - lin;
}

}  // namespace philap
