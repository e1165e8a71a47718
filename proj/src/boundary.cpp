#include <philap/boundary.hpp>

#include <philap/errors.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace philap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kProxIterations = 200;
constexpr double kProxTol = 1e-10;

}  // namespace

ConvexSetK ConvexSetK::subspace(double a, double b) {
  if (!(std::abs(a) + std::abs(b) > 0.0)) throw DomainError("subspace needs |a| + |b| > 0");
  ConvexSetK k{SetKind::Subspace};
  k.a_coef = a;
  k.b_coef = b;
  return k;
}

ConvexSetK ConvexSetK::strip(double sigma) {
  if (!(sigma >= 0.0)) throw DomainError("strip width must be nonnegative");
  ConvexSetK k{SetKind::Strip};
  k.sigma = sigma;
  return k;
}

SetKind ConvexSetK::effective_kind() const {
  if (kind == SetKind::Strip) {
    if (sigma == 0.0) return SetKind::Diagonal;
    if (std::isinf(sigma)) return SetKind::FullSpace;
  }
  if (kind == SetKind::Subspace && a_coef == b_coef) return SetKind::Diagonal;
  if (kind == SetKind::Subspace && a_coef == -b_coef) return SetKind::AntiDiagonal;
  return kind;
}

Eigen::Matrix2Xd ConvexSetK::basis() const {
  const double r = 1.0 / std::sqrt(2.0);
  switch (effective_kind()) {
    case SetKind::Point:
      return Eigen::Matrix2Xd(2, 0);
    case SetKind::FullSpace:
      return Eigen::Matrix2d::Identity();
    case SetKind::Diagonal:
      return Eigen::Vector2d(r, r);
    case SetKind::AntiDiagonal:
      return Eigen::Vector2d(r, -r);
    case SetKind::Subspace:
      return Eigen::Vector2d(b_coef, a_coef).normalized();
    case SetKind::Strip:
      break;
  }
  throw UnsupportedError("strip with finite positive width is not a subspace");
}

std::string ConvexSetK::describe() const {
  std::ostringstream os;
  switch (kind) {
    case SetKind::Point: os << "point"; break;
    case SetKind::FullSpace: os << "full_space"; break;
    case SetKind::Diagonal: os << "diagonal"; break;
    case SetKind::AntiDiagonal: os << "anti_diagonal"; break;
    case SetKind::Subspace: os << "subspace(a=" << a_coef << ", b=" << b_coef << ")"; break;
    case SetKind::Strip: os << "strip(sigma=" << sigma << ")"; break;
  }
  return os.str();
}

SmoothPart SmoothPart::quadratic_difference(double c) {
  if (!(c >= 0.0)) throw DomainError("quadratic coupling needs c >= 0");
  SmoothPart g;
  g.kind = GKind::QuadraticDifference;
  g.c = c;
  return g;
}

SmoothPart SmoothPart::exp_difference() {
  SmoothPart g;
  g.kind = GKind::ExpDifference;
  return g;
}

SmoothPart SmoothPart::robin(double k0, double k1) {
  if (!(k0 >= 0.0 && k1 >= 0.0)) throw DomainError("Robin coefficients must be nonnegative");
  SmoothPart g;
  g.kind = GKind::Robin;
  g.k0 = k0;
  g.k1 = k1;
  return g;
}

SmoothPart SmoothPart::custom(std::function<double(const Vec&, const Vec&)> value,
                              std::function<EndpointPair(const Vec&, const Vec&)> gradient,
                              bool difference_form) {
  if (!value || !gradient) throw DomainError("custom coupling needs value and gradient");
  SmoothPart g;
  g.kind = GKind::Custom;
  g.value_fn = std::move(value);
  g.gradient_fn = std::move(gradient);
  g.custom_difference_form = difference_form;
  return g;
}

bool SmoothPart::difference_form() const {
  switch (kind) {
    case GKind::None:
    case GKind::QuadraticDifference:
    case GKind::ExpDifference:
      return true;
    case GKind::Robin:
      return k0 == 0.0 && k1 == 0.0;
    case GKind::Custom:
      return custom_difference_form;
  }
  return false;
}

double SmoothPart::value(const Vec& x, const Vec& y) const {
  switch (kind) {
    case GKind::None:
      return 0.0;
    case GKind::QuadraticDifference:
      return 0.5 * c * (x - y).squaredNorm();
    case GKind::ExpDifference:
      return 0.5 * std::expm1((x - y).squaredNorm());
    case GKind::Robin:
      return 0.5 * (k0 * x.squaredNorm() + k1 * y.squaredNorm());
    case GKind::Custom:
      return value_fn(x, y);
  }
  return 0.0;
}

EndpointPair SmoothPart::gradient(const Vec& x, const Vec& y) const {
  switch (kind) {
    case GKind::None:
      return EndpointPair::zero(static_cast<int>(x.size()));
    case GKind::QuadraticDifference: {
      const Vec d = c * (x - y);
      return {d, -d};
    }
    case GKind::ExpDifference: {
      const Vec dv = x - y;
      const Vec d = std::exp(dv.squaredNorm()) * dv;
      return {d, -d};
    }
    case GKind::Robin:
      return {k0 * x, k1 * y};
    case GKind::Custom:
      return gradient_fn(x, y);
  }
  return EndpointPair::zero(static_cast<int>(x.size()));
}

Mat SmoothPart::hessian(const Vec& x, const Vec& y) const {
  const auto n = x.size();
  Mat H = Mat::Zero(2 * n, 2 * n);
  auto difference_block = [&](const Mat& B) {
    H.topLeftCorner(n, n) = B;
    H.bottomRightCorner(n, n) = B;
    H.topRightCorner(n, n) = -B;
    H.bottomLeftCorner(n, n) = -B;
  };
  switch (kind) {
    case GKind::None:
      break;
    case GKind::QuadraticDifference:
      difference_block(c * Mat::Identity(n, n));
      break;
    case GKind::ExpDifference: {
      const Vec d = x - y;
      difference_block(std::exp(d.squaredNorm()) * (Mat::Identity(n, n) + 2.0 * d * d.transpose()));
      break;
    }
    case GKind::Robin:
      H.topLeftCorner(n, n) = k0 * Mat::Identity(n, n);
      H.bottomRightCorner(n, n) = k1 * Mat::Identity(n, n);
      break;
    case GKind::Custom: {
      const Vec z = EndpointPair{x, y}.stacked();
      const double h = 1e-6 * (1.0 + z.lpNorm<Eigen::Infinity>());
      for (Eigen::Index k = 0; k < 2 * n; ++k) {
        Vec zp = z, zm = z;
        zp[k] += h;
        zm[k] -= h;
        const EndpointPair gp = gradient(zp.head(n), zp.tail(n));
        const EndpointPair gm = gradient(zm.head(n), zm.tail(n));
        H.col(k) = (gp.stacked() - gm.stacked()) / (2.0 * h);
      }
      H = 0.5 * (H + H.transpose()).eval();
      break;
    }
  }
  return H;
}

std::string BoundaryFunctional::describe() const {
  std::string s = set.describe();
  switch (g.kind) {
    case GKind::None: break;
    case GKind::QuadraticDifference: s += " + quadratic(x-y)"; break;
    case GKind::ExpDifference: s += " + exp_f(x-y)"; break;
    case GKind::Robin: s += " + robin"; break;
    case GKind::Custom: s += " + custom"; break;
  }
  return s;
}

bool in_set(const ConvexSetK& set, const Vec& x, const Vec& y, double tol) {
  const double scale = tol * (1.0 + std::max(x.norm(), y.norm()));
  switch (set.effective_kind()) {
    case SetKind::Point:
      return x.norm() <= scale && y.norm() <= scale;
    case SetKind::FullSpace:
      return true;
    case SetKind::Diagonal:
      return (x - y).norm() <= scale;
    case SetKind::AntiDiagonal:
      return (x + y).norm() <= scale;
    case SetKind::Subspace:
      return (set.a_coef * x - set.b_coef * y).norm() <=
             scale * std::hypot(set.a_coef, set.b_coef);
    case SetKind::Strip:
      return (x - y).norm() <= set.sigma + scale;
  }
  return false;
}

double j_eval(const BoundaryFunctional& j, const Vec& x, const Vec& y, double tol) {
  if (!in_set(j.set, x, y, tol)) return kInf;
  return j.g.value(x, y);
}

EndpointPair project_K(const ConvexSetK& set, const Vec& x, const Vec& y) {
  switch (set.effective_kind()) {
    case SetKind::Point:
      return EndpointPair::zero(static_cast<int>(x.size()));
    case SetKind::FullSpace:
      return {x, y};
    case SetKind::Diagonal: {
      const Vec m = 0.5 * (x + y);
      return {m, m};
    }
    case SetKind::AntiDiagonal: {
      const Vec m = 0.5 * (x - y);
      return {m, -m};
    }
    case SetKind::Subspace: {
      const double a = set.a_coef, b = set.b_coef;
      const Vec t = (b * x + a * y) / (a * a + b * b);
      return {b * t, a * t};
    }
    case SetKind::Strip: {
      const Vec s = x + y;
      Vec d = x - y;
      const double nd = d.norm();
      if (nd > set.sigma) d *= set.sigma / nd;
      return {0.5 * (s + d), 0.5 * (s - d)};
    }
  }
  return {x, y};
}

namespace {

struct Quadratic {
  const BoundaryFunctional& j;
  const Vec& center;  // stacked
  const Mat& S;
  double mu = 0.0;  // strip multiplier: adds (mu/2)|x - y|^2
  Eigen::Index n;

  double value(const Vec& z) const {
    const Vec r = z - center;
    double v = 0.5 * r.dot(S * r) + j.g.value(z.head(n), z.tail(n));
    if (mu > 0.0) v += 0.5 * mu * (z.head(n) - z.tail(n)).squaredNorm();
    return v;
  }
  Vec gradient(const Vec& z) const {
    Vec gr = S * (z - center) + j.g.gradient(z.head(n), z.tail(n)).stacked();
    if (mu > 0.0) {
      const Vec d = mu * (z.head(n) - z.tail(n));
      gr.head(n) += d;
      gr.tail(n) -= d;
    }
    return gr;
  }
  Mat hessian(const Vec& z) const {
    Mat H = S + j.g.hessian(z.head(n), z.tail(n));
    if (mu > 0.0) {
      const Mat I = mu * Mat::Identity(n, n);
      H.topLeftCorner(n, n) += I;
      H.bottomRightCorner(n, n) += I;
      H.topRightCorner(n, n) -= I;
      H.bottomLeftCorner(n, n) -= I;
    }
    return H;
  }
};

// Damped Newton over z = B w; B has orthonormal columns.
Vec newton_on_subspace(const Quadratic& q, const Mat& B, Vec w) {
  const double scale = 1.0 + (q.S * q.center).norm();
  double f = q.value(B * w);
  for (int it = 0; it < kProxIterations; ++it) {
    const Vec z = B * w;
    const Vec gr = B.transpose() * q.gradient(z);
    if (gr.norm() <= kProxTol * scale) return w;
    const Mat H = B.transpose() * q.hessian(z) * B;
    Eigen::LDLT<Mat> ldlt(H);
    Vec step = -ldlt.solve(gr);
    if (ldlt.info() != Eigen::Success || !step.allFinite() || gr.dot(step) >= 0.0) step = -gr;
    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Vec wn = w + t * step;
      const double fn = q.value(B * wn);
      if (std::isfinite(fn) && fn <= f + 1e-4 * t * gr.dot(step)) {
        w = wn;
        f = fn;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      // No decrease representable: accept only if already at machine-level stationarity.
      if (gr.norm() <= 1e3 * kProxTol * scale) return w;
      throw ConvergenceError("prox: line search failed");
    }
    if ((t * step).norm() <= 1e-15 * (1.0 + w.norm())) return w;
  }
  throw ConvergenceError("prox: Newton iteration cap reached");
}

Mat stacked_basis(const ConvexSetK& set, Eigen::Index n) {
  const Eigen::Matrix2Xd b = set.basis();
  const Eigen::Index k = b.cols();
  Mat B = Mat::Zero(2 * n, k * n);
  for (Eigen::Index m = 0; m < k; ++m) {
    for (Eigen::Index c = 0; c < n; ++c) {
      B(c, m * n + c) = b(0, m);
      B(n + c, m * n + c) = b(1, m);
    }
  }
  return B;
}

}  // namespace

EndpointPair prox_metric(const BoundaryFunctional& j, const EndpointPair& center, const Mat& S) {
  const Eigen::Index n = center.x.size();
  const Vec c = center.stacked();
  Quadratic q{j, c, S, 0.0, n};

  if (j.set.is_linear()) {
    const Mat B = stacked_basis(j.set, n);
    if (B.cols() == 0) return EndpointPair::zero(static_cast<int>(n));
    Vec w;
    if (!j.g.present()) {
      const Mat H = B.transpose() * S * B;
      w = H.ldlt().solve(B.transpose() * S * c);
      return EndpointPair::from_stacked(B * w);
    }
    w = newton_on_subspace(q, B, Vec::Zero(B.cols()));
    return EndpointPair::from_stacked(B * w);
  }

  // Strip with 0 < sigma < inf: unconstrained solve, then a multiplier on |x - y|^2.
  const double sigma = j.set.sigma;
  const Mat I = Mat::Identity(2 * n, 2 * n);
  auto solve = [&](double mu, const Vec& start) {
    q.mu = mu;
    if (!j.g.present()) {
      return Vec(q.hessian(start).ldlt().solve(S * c));
    }
    return newton_on_subspace(q, I, start);
  };
  auto gap = [&](const Vec& z) { return (z.head(n) - z.tail(n)).norm(); };

  const EndpointPair start = project_K(j.set, center.x, center.y);
  Vec z = solve(0.0, j.g.present() ? Vec(start.stacked()) : c);
  if (gap(z) <= sigma) return EndpointPair::from_stacked(z);

  // 1/|d(mu)| is increasing in mu and close to affine; bracket then Illinois regula falsi.
  auto h = [&](double mu, Vec& zz) {
    zz = solve(mu, zz);
    return 1.0 / std::max(gap(zz), 1e-300) - 1.0 / sigma;
  };
  double lo = 0.0, hi = 1.0;
  Vec zlo = z, zhi = z;
  double hlo = 1.0 / gap(z) - 1.0 / sigma;
  double hhi = h(hi, zhi);
  for (int it = 0; hhi < 0.0; ++it) {
    if (it > 200) throw ConvergenceError("prox: strip multiplier bracket failed");
    lo = hi;
    hlo = hhi;
    zlo = zhi;
    hi *= 4.0;
    hhi = h(hi, zhi);
  }
  Vec zm = zhi;
  int side = 0;
  for (int it = 0; it < kProxIterations; ++it) {
    double mu = (lo * hhi - hi * hlo) / (hhi - hlo);
    if (!(mu > lo && mu < hi)) mu = 0.5 * (lo + hi);
    zm = (hlo > -hhi) ? zlo : zhi;
    const double hm = h(mu, zm);
    if (std::abs(gap(zm) - sigma) <= 1e-14 * (1.0 + sigma) || hi - lo <= 1e-15 * hi) break;
    if (hm < 0.0) {
      lo = mu;
      hlo = hm;
      zlo = zm;
      if (side == -1) hhi *= 0.5;
      side = -1;
    } else {
      hi = mu;
      hhi = hm;
      zhi = zm;
      if (side == 1) hlo *= 0.5;
      side = 1;
    }
    if (it + 1 == kProxIterations) throw ConvergenceError("prox: strip multiplier did not converge");
  }
  const EndpointPair out = EndpointPair::from_stacked(zm);
  return project_K(j.set, out.x, out.y);
}

EndpointPair prox_j(const BoundaryFunctional& j, const Vec& x, const Vec& y, double step) {
  if (!(step > 0.0)) throw DomainError("prox step must be positive");
  if (!j.g.present()) return project_K(j.set, x, y);
  const Eigen::Index n = x.size();
  return prox_metric(j, {x, y}, Mat::Identity(2 * n, 2 * n) / step);
}

double normal_cone_distance(const ConvexSetK& set, const EndpointPair& z, const EndpointPair& xi,
                            double tol) {
  if (!in_set(set, z.x, z.y, tol)) throw DomainError("normal cone queried at a point outside K");
  const Vec& v1 = xi.x;
  const Vec& v2 = xi.y;
  switch (set.effective_kind()) {
    case SetKind::Point:
      return 0.0;
    case SetKind::FullSpace:
      return norm(xi);
    case SetKind::Diagonal:  // cone {(p, -p)}
      return (v1 + v2).norm() / std::sqrt(2.0);
    case SetKind::AntiDiagonal:  // cone {(p, p)}
      return (v1 - v2).norm() / std::sqrt(2.0);
    case SetKind::Subspace: {  // cone {b xi1 + a xi2 = 0}
      const double a = set.a_coef, b = set.b_coef;
      return (b * v1 + a * v2).norm() / std::hypot(a, b);
    }
    case SetKind::Strip: {
      const Vec d = z.x - z.y;
      const double nd = d.norm();
      if (nd < set.sigma - tol) return norm(xi);
      // Ray {s (d, -d) : s >= 0}.
      const double s = std::max(0.0, (v1.dot(d) - v2.dot(d)) / (2.0 * nd * nd));
      return std::sqrt((v1 - s * d).squaredNorm() + (v2 + s * d).squaredNorm());
    }
  }
  return kInf;
}

bool normal_cone_membership(const ConvexSetK& set, const EndpointPair& z, const EndpointPair& xi,
                            double tol) {
  return normal_cone_distance(set, z, xi, tol) <= tol;
}

double subdifferential_distance(const BoundaryFunctional& j, const EndpointPair& z,
                                const EndpointPair& xi, double tol) {
  const EndpointPair gg = j.g.gradient(z.x, z.y);
  return normal_cone_distance(j.set, z, {xi.x - gg.x, xi.y - gg.y}, tol);
}

double subdifferential_residual(const BoundaryFunctional& j, const EndpointPair& z,
                                const EndpointPair& xi, double probe_radius, int probe_count,
                                std::uint64_t seed) {
  const double jz = j_eval(j, z.x, z.y, 1e-9);
  if (!std::isfinite(jz)) throw DomainError("subdifferential queried outside D(j)");
  const Eigen::Index n = z.x.size();
  const Vec zs = z.stacked();
  const Vec xs = xi.stacked();
  double worst = 0.0;
  auto probe = [&](const Vec& dir, double r) {
    const Vec p = zs + r * dir;
    const EndpointPair w = project_K(j.set, p.head(n), p.tail(n));
    const double jw = j.g.value(w.x, w.y);
    if (!std::isfinite(jw)) return;
    const double v = xs.dot(w.stacked() - zs) - jw + jz;
    worst = std::max(worst, v);
  };
  for (Eigen::Index k = 0; k < 2 * n; ++k) {
    for (double r : {probe_radius, 1e-3 * probe_radius}) {
      probe(Vec::Unit(2 * n, k), r);
      probe(-Vec::Unit(2 * n, k), r);
    }
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  for (int k = 0; k < probe_count; ++k) {
    Vec dir(2 * n);
    for (Eigen::Index c = 0; c < 2 * n; ++c) dir[c] = gauss(rng);
    const double nd = dir.norm();
    if (nd == 0.0) continue;
    probe(dir / nd, probe_radius * std::pow(10.0, -(k % 4)));
  }
  return worst;
}

bool cone_diagonal_trivial(const BoundaryFunctional& j) {
  switch (j.set.effective_kind()) {
    case SetKind::Point:
    case SetKind::AntiDiagonal:
    case SetKind::Subspace:  // a != b here; a == b is reported as Diagonal
      return true;
    default:
      return false;
  }
}

std::pair<bool, bool> projections_bounded(const BoundaryFunctional& j) {
  switch (j.set.effective_kind()) {
    case SetKind::Point:
      return {true, true};
    case SetKind::Subspace:
      return {j.set.b_coef == 0.0, j.set.a_coef == 0.0};
    default:
      return {false, false};
  }
}

namespace {

bool contains_diagonal(const ConvexSetK& set) {
  switch (set.effective_kind()) {
    case SetKind::FullSpace:
    case SetKind::Diagonal:
    case SetKind::Strip:
      return true;
    default:
      return false;
  }
}

}  // namespace

bool shift_invariant_diagonal(const BoundaryFunctional& j) {
  if (!contains_diagonal(j.set)) return false;
  if (j.g.difference_form()) return true;
  if (j.g.kind == GKind::Robin) return false;
  throw UnsupportedError("shift invariance needs a coupling of the form f(x - y)");
}

bool zero_on_diagonal(const BoundaryFunctional& j) {
  return contains_diagonal(j.set) && j.g.difference_form();
}

bool bounded_on_domain(const BoundaryFunctional& j) {
  if (!j.g.present()) return true;
  switch (j.set.effective_kind()) {
    case SetKind::Point:
      return true;
    case SetKind::Diagonal:
    case SetKind::Strip:
      return j.g.difference_form();
    default:
      return false;
  }
}

}  // namespace philap
