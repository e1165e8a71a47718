#include <philap/variational.hpp>

#include <philap/detail/newton.hpp>
#include <philap/kernels.hpp>
#include <philap/verification.hpp>

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <sstream>

namespace philap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sup_rows(const NodeMat& m) { return m.rowwise().norm().maxCoeff(); }

Eigen::Map<const Vec> flat(const NodeMat& m) { return {m.data(), m.size()}; }

}  // namespace

std::string to_string(SolverMode m) {
  switch (m) {
    case SolverMode::Minimize: return "minimize";
    case SolverMode::CriticalPoint: return "critical_point";
    case SolverMode::Auto: return "auto";
  }
  return "auto";
}

void SolverOptions::validate() const {
  if (!(tol_grad > 0.0) || !(tol_fix > 0.0) || !(check_tol > 0.0)) {
    throw DomainError("solver tolerances must be positive");
  }
  if (max_outer < 1) throw DomainError("solver max_outer must be >= 1");
  if (!(damping > 0.0 && damping <= 1.0)) throw DomainError("solver damping must lie in (0, 1]");
  if (!(margin > 0.0 && margin < 1.0)) throw DomainError("solver margin must lie in (0, 1)");
  if (anderson_memory < 0) throw DomainError("anderson_memory must be >= 0");
  if (check_samples < 0) throw DomainError("check_samples must be >= 0");
}

GridFunction default_init(const ProblemSpec& spec) { return GridFunction::zeros(spec.grid, spec.N); }

GridFunction make_admissible(const ProblemSpec& spec, GridFunction u, double margin) {
  const int m = u.grid.M;
  const EndpointPair e = project_K(spec.boundary.set, u.node(0), u.node(m));
  u.values.row(0) = e.x.transpose();
  u.values.row(m) = e.y.transpose();
  for (int k = 0; k < 200 && !feasible(u, spec.phi, margin); ++k) u.values *= 0.5;
  if (!feasible(u, spec.phi, margin)) u.values.setZero();
  return u;
}

double critical_point_inequality(const ProblemSpec& spec, const GridFunction& u, int samples,
                                 std::uint64_t seed) {
  double worst = kInf;
  const EnergyMode mode = EnergyMode::full();
  for (const GridFunction& v : sample_admissible(spec, u, samples, seed)) {
    worst = std::min(worst, variational_inequality(spec, mode, u, v));
  }
  return samples > 0 ? worst : 0.0;
}

SolverResult minimize_energy(const ProblemSpec& spec, const GridFunction& init,
                             const SolverOptions& opts) {
  opts.validate();
  GridFunction start = make_admissible(spec, init, opts.margin);
  const double e0 = energy_eval(spec, start, EnergyMode::full()).total;

  detail::EndpointTerms ends;
  ends.j = spec.boundary;
  detail::NewtonOptions nopts;
  nopts.tol = opts.tol_grad;
  nopts.max_iter = opts.max_outer;
  nopts.margin = opts.margin;
  detail::NewtonResult r = detail::prox_newton(spec, EnergyMode::full(), ends, std::move(start), nopts);
  if (!r.converged) {
    std::ostringstream os;
    os << "minimize_energy: stationarity residual " << r.residual << " after " << r.iterations
       << " iterations";
    throw SolverFailure(os.str(), std::move(r.u), std::move(r.energy_trace));
  }
  const double e1 = energy_eval(spec, r.u, EnergyMode::full()).total;
  if (!(e1 <= e0 + 1e-12 * (1.0 + std::abs(e0)))) {
    throw SolverFailure("minimize_energy: energy increased", std::move(r.u),
                        std::move(r.energy_trace));
  }
  if (!feasible(r.u, spec.phi, 0.1 * opts.margin)) {
    throw SolverFailure("minimize_energy: iterate left the derivative ball", std::move(r.u),
                        std::move(r.energy_trace));
  }
  SolverResult out;
  out.critical_gap = critical_point_inequality(spec, r.u, opts.check_samples, opts.seed);
  if (out.critical_gap < -opts.check_tol) {
    std::ostringstream os;
    os << "minimize_energy: critical-point inequality violated by " << -out.critical_gap;
    throw SolverFailure(os.str(), std::move(r.u), std::move(r.energy_trace));
  }
  out.u = std::move(r.u);
  out.mode_used = SolverMode::Minimize;
  out.iterations = r.iterations;
  out.residual = r.residual;
  out.trace = std::move(r.energy_trace);
  return out;
}

SolverResult critical_point_iteration(const ProblemSpec& spec, const GridFunction& init,
                                      const SolverOptions& opts) {
  opts.validate();
  const Grid& grid = spec.grid;
  const NodeMat h = spec.h_samples();
  const int rows = grid.M + 1;
  const int n = spec.N;
  const Eigen::Index len = static_cast<Eigen::Index>(rows) * n;

  GridFunction warm = make_admissible(spec, init, opts.margin);
  auto G = [&](const NodeMat& u) {
    const GridFunction uf{grid, u};
    const NodeMat rhs = u + kernels::node_gradient(spec, uf) + h;
    InclusionResult s = solve_P_partial_j(spec.phi, spec.boundary, rhs, grid, opts.inner,
                                          std::nullopt, &warm);
    warm = s.u;
    return std::move(s.u.values);
  };

  NodeMat u = init.values;
  if (u.rows() != rows || u.cols() != n) throw DomainError("critical_point_iteration: init shape");
  std::deque<Vec> dF, dG;
  Vec f_prev, g_prev;
  std::vector<double> trace;
  double best_res = kInf;
  NodeMat best_g;

  for (int k = 0; k < opts.max_outer; ++k) {
    const NodeMat g = G(u);
    const NodeMat fm = g - u;
    const double res = sup_rows(fm);
    trace.push_back(res);
    if (res < best_res) {
      best_res = res;
      best_g = g;
    }
    if (res <= opts.tol_fix) {
      SolverResult out;
      out.u = GridFunction{grid, g};
      out.mode_used = SolverMode::CriticalPoint;
      out.iterations = k + 1;
      out.residual = res;
      out.trace = std::move(trace);
      out.critical_gap = critical_point_inequality(spec, out.u, opts.check_samples, opts.seed);
      if (out.critical_gap < -opts.check_tol) {
        std::ostringstream os;
        os << "critical_point_iteration: critical-point inequality violated by "
           << -out.critical_gap;
        throw SolverFailure(os.str(), std::move(out.u), std::move(out.trace));
      }
      return out;
    }

    const Vec f = flat(fm);
    const Vec gv = flat(g);
    if (opts.anderson_memory > 0 && f_prev.size() == len) {
      dF.push_back(f - f_prev);
      dG.push_back(gv - g_prev);
      if (static_cast<int>(dF.size()) > opts.anderson_memory) {
        dF.pop_front();
        dG.pop_front();
      }
    }
    f_prev = f;
    g_prev = gv;
    // Restart the history when the residual blows up relative to the best seen.
    if (res > 1e3 * best_res && !dF.empty()) {
      dF.clear();
      dG.clear();
      u = best_g;
      f_prev.resize(0);
      continue;
    }

    Vec next = flat(u) + opts.damping * f;
    if (!dF.empty()) {
      const auto mk = static_cast<Eigen::Index>(dF.size());
      Mat Fm(len, mk), Gm(len, mk);
      for (Eigen::Index c = 0; c < mk; ++c) {
        Fm.col(c) = dF[static_cast<std::size_t>(c)];
        Gm.col(c) = dG[static_cast<std::size_t>(c)];
      }
      const Vec gamma = Fm.colPivHouseholderQr().solve(f);
      if (gamma.allFinite()) {
        const Mat Um = Gm - Fm;
        next = flat(u) + opts.damping * f - (Um + opts.damping * Fm) * gamma;
      }
    }
    u = Eigen::Map<const NodeMat>(next.data(), rows, n);
  }
  std::ostringstream os;
  os << "critical_point_iteration: fixed-point residual " << best_res << " after "
     << opts.max_outer << " iterations";
  throw SolverFailure(os.str(), GridFunction{grid, best_g.size() ? best_g : u}, std::move(trace));
}

SolverResult solve(const ProblemSpec& spec, const SolverOptions& opts,
                   const std::optional<GridFunction>& init) {
  const GridFunction start = init ? *init : default_init(spec);
  SolverMode mode = opts.mode;
  std::optional<RegimeReport> regime;
  if (mode == SolverMode::Auto) {
    regime = classify_regime(spec, 8, opts.seed);
    const bool minimum = regime->has(RegimeFlag::AntiCoercive) ||
                         regime->has(RegimeFlag::CoerciveLess) ||
                         regime->has(RegimeFlag::Lambda1Positive) ||
                         regime->has(RegimeFlag::BoundedProjection) ||
                         regime->has(RegimeFlag::PeriodicReduction);
    const bool saddle = regime->has(RegimeFlag::SemiCoerciveSaddle) ||
                        regime->has(RegimeFlag::CoercivePlus);
    mode = (saddle && !minimum) ? SolverMode::CriticalPoint : SolverMode::Minimize;
  }
  return mode == SolverMode::Minimize ? minimize_energy(spec, start, opts)
                                      : critical_point_iteration(spec, start, opts);
}

GridFunction reduce_periodic(const ProblemSpec& spec, const GridFunction& u) {
  if (!spec.periods) throw DomainError("reduce_periodic: the problem declares no periods");
  bool invariant = false;
  try {
    invariant = shift_invariant_diagonal(spec.boundary);
  } catch (const UnsupportedError&) {
    invariant = false;
  }
  if (!invariant) {
    throw DomainError("reduce_periodic: boundary functional is not invariant under diagonal shifts");
  }
  const Vec mean = mean_oscillation(u).mean;
  GridFunction out = u;
  for (int c = 0; c < u.dim(); ++c) {
    const double om = (*spec.periods)[c];
    const double k = std::floor(mean[c] / om);
    out.values.col(c).array() -= k * om;
  }
  return out;
}

SaddleCertificate saddle_certificate(const ProblemSpec& spec, const GridFunction& u,
                                     double margin, std::uint64_t seed) {
  SaddleCertificate cert;
  cert.solution_energy = energy_eval(spec, u, EnergyMode::full()).total;
  const int n = spec.N;
  std::vector<Vec> dirs;
  for (int k = 0; k < n; ++k) {
    dirs.push_back(Vec::Unit(n, k));
    dirs.push_back(-Vec::Unit(n, k));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  for (int k = 0; k < 8; ++k) {
    Vec d(n);
    for (int c = 0; c < n; ++c) d[c] = gauss(rng);
    if (d.norm() > 0.0) dirs.push_back(d / d.norm());
  }
  const double target = cert.solution_energy - margin * (1.0 + std::abs(cert.solution_energy));
  double best = kInf;
  for (int level = 0; level < 20; ++level) {
    const double r = std::ldexp(1.0, level);
    for (const Vec& d : dirs) {
      const Vec x = r * d;
      if (!std::isfinite(j_eval(spec.boundary, x, x, 1e-12))) continue;
      const double e = energy_eval(spec, GridFunction::constant(spec.grid, x), EnergyMode::full()).total;
      if (e < best) {
        best = e;
        cert.witness = x;
        cert.witness_energy = e;
      }
    }
    if (best < target) break;
  }
  cert.is_saddle = best < target;
  if (!cert.is_saddle) cert.witness.resize(0);
  return cert;
}

RegimeReport classify_regime(const ProblemSpec& spec, int radial_samples, std::uint64_t seed,
                             double R) {
  RegimeReport rep;
  const BoundaryFunctional& j = spec.boundary;
  const int n = spec.N;

  if (j.set.is_linear()) {
    try {
      rep.lambda1 = rayleigh_lambda1(j, spec.grid, n);
      if (*rep.lambda1 > 1e-10) rep.flags.push_back(RegimeFlag::Lambda1Positive);
    } catch (const UnsupportedError&) {
    }
  }
  if (cone_diagonal_trivial(j)) rep.flags.push_back(RegimeFlag::ConeDiagonalTrivial);
  const auto [p1, p2] = projections_bounded(j);
  if (p1 || p2) rep.flags.push_back(RegimeFlag::BoundedProjection);
  bool shift_invariant = false;
  try {
    shift_invariant = shift_invariant_diagonal(j);
  } catch (const UnsupportedError&) {
  }
  if (spec.periods && shift_invariant) rep.flags.push_back(RegimeFlag::PeriodicReduction);

  // Radial ladder of x -> int_0^T F(t, x) dt.
  std::vector<Vec> dirs;
  for (int k = 0; k < n; ++k) {
    dirs.push_back(Vec::Unit(n, k));
    dirs.push_back(-Vec::Unit(n, k));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  for (int k = 0; k < radial_samples; ++k) {
    Vec d(n);
    for (int c = 0; c < n; ++c) d[c] = gauss(rng);
    if (d.norm() > 0.0) dirs.push_back(d / d.norm());
  }
  constexpr int kQuad = 256;
  const double T = spec.grid.T;
  const std::vector<double> radii{R, 2 * R, 4 * R, 8 * R};
  double scale = 0.0;
  for (const Vec& d : dirs) {
    RadialEvidence ev;
    ev.direction.assign(d.data(), d.data() + d.size());
    ev.radii = radii;
    for (double r : radii) {
      const Vec x = r * d;
      std::vector<double> f(kQuad + 1);
      for (int i = 0; i <= kQuad; ++i) f[i] = spec.potential.F(T * i / kQuad, x);
      double fine = 0.0, coarse = 0.0;
      for (int i = 0; i < kQuad; ++i) fine += 0.5 * (f[i] + f[i + 1]) * T / kQuad;
      for (int i = 0; i < kQuad; i += 2) coarse += 0.5 * (f[i] + f[i + 2]) * 2.0 * T / kQuad;
      rep.quadrature_noise = std::max(rep.quadrature_noise, std::abs(fine - coarse));
      scale = std::max(scale, std::abs(fine));
      ev.integral_F.push_back(fine);
      ev.max_F.push_back(*std::max_element(f.begin(), f.end()));
      ev.min_F.push_back(*std::min_element(f.begin(), f.end()));
    }
    rep.evidence.push_back(std::move(ev));
  }
  rep.threshold = std::max(10.0 * rep.quadrature_noise, 1e-12 * (1.0 + scale));
  const double thr = rep.threshold;

  auto falling = [&](const std::vector<double>& v) {
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (!(v[k] < -thr)) return false;
      if (k > 0 && !(v[k] < v[k - 1] - thr)) return false;
    }
    return true;
  };
  auto rising = [&](const std::vector<double>& v) {
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (!(v[k] > thr)) return false;
      if (k > 0 && !(v[k] > v[k - 1] + thr)) return false;
    }
    return true;
  };
  bool all_fall = true, all_rise = true, pointwise_rise = true, below = true;
  rep.phi_gap = spec.phi.min_potential(n) - spec.phi.phi0_value();
  for (const RadialEvidence& ev : rep.evidence) {
    all_fall = all_fall && falling(ev.integral_F);
    all_rise = all_rise && rising(ev.integral_F);
    pointwise_rise = pointwise_rise && rising(ev.min_F);
    for (double mf : ev.max_F) below = below && mf < rep.phi_gap - thr;
  }
  const bool j_conditions = zero_on_diagonal(j) && bounded_on_domain(j);
  if (all_fall) rep.flags.push_back(RegimeFlag::AntiCoercive);
  if (all_rise && j_conditions) rep.flags.push_back(RegimeFlag::SemiCoerciveSaddle);
  if (below) rep.flags.push_back(RegimeFlag::CoerciveLess);
  if (pointwise_rise && j_conditions) rep.flags.push_back(RegimeFlag::CoercivePlus);
  if (rep.flags.empty()) rep.flags.push_back(RegimeFlag::Unknown);
  return rep;
}

}  // namespace philap
