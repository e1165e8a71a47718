#include <philap/phi_map.hpp>

#include <philap/errors.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace philap {

namespace {

// 1 - r^2 without cancellation near r = 1.
double one_minus_sq(double r) { return (1.0 - r) * (1.0 + r); }

// 1 - r^p without cancellation near r = 1.
double one_minus_pow(double r, double p) { return -std::expm1(p * std::log1p(r - 1.0)); }

double norm_of(std::span<const double> y) {
  double s = 0.0;
  for (double v : y) s += v * v;
  return std::sqrt(s);
}

}  // namespace

PhiMap PhiMap::relativistic(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("phi radius must be positive");
  PhiMap m;
  m.kind_ = PhiKind::Relativistic;
  m.a_ = a;
  m.p_ = 2.0;
  m.phi0_ = -a;
  return m;
}

PhiMap PhiMap::p_relativistic(double p, double a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("phi radius must be positive");
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("p-relativistic exponent must exceed 1");
  PhiMap m;
  m.kind_ = PhiKind::PRelativistic;
  m.a_ = a;
  m.p_ = p;
  m.phi0_ = -a;
  return m;
}

PhiMap PhiMap::custom(double a, CustomPhi fns) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("phi radius must be positive");
  if (!fns.phi || !fns.potential) throw DomainError("custom phi needs phi and potential callables");
  PhiMap m;
  m.kind_ = PhiKind::Custom;
  m.a_ = a;
  m.custom_ = std::make_shared<const CustomPhi>(std::move(fns));
  m.phi0_ = m.custom_->potential(Vec::Zero(1));
  return m;
}

double PhiMap::profile(double r) const {
  if (r == 0.0) return 0.0;
  if (kind_ == PhiKind::Relativistic) return r / std::sqrt(one_minus_sq(r));
  return std::pow(r, p_ - 1.0) * std::pow(one_minus_pow(r, p_), 1.0 / p_ - 1.0);
}

double PhiMap::profile_derivative(double r) const {
  if (kind_ == PhiKind::Relativistic) {
    const double s = one_minus_sq(r);
    return 1.0 / (s * std::sqrt(s));
  }
  if (r == 0.0) {
    if (p_ == 2.0) return 1.0;
    return p_ > 2.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return (p_ - 1.0) * std::pow(r, p_ - 2.0) * std::pow(one_minus_pow(r, p_), 1.0 / p_ - 2.0);
}

double PhiMap::profile_potential(double r) const {
  if (kind_ == PhiKind::Relativistic) return -std::sqrt(std::max(0.0, one_minus_sq(r)));
  return -std::pow(std::max(0.0, one_minus_pow(r, p_)), 1.0 / p_);
}

double PhiMap::profile_inverse(double zeta) const {
  if (zeta == 0.0) return 0.0;
  if (kind_ == PhiKind::Relativistic) return zeta / std::sqrt(1.0 + zeta * zeta);
  // r^p / (1 - r^p) = zeta^{p/(p-1)}
  const double q = std::pow(zeta, p_ / (p_ - 1.0));
  if (!std::isfinite(q)) return std::nextafter(1.0, 0.0);
  return std::pow(q / (1.0 + q), 1.0 / p_);
}

void PhiMap::phi(std::span<const double> y, std::span<double> out) const {
  if (!radial()) {
    Vec v = custom_->phi(as_vec(y));
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = v[static_cast<Eigen::Index>(k)];
    return;
  }
  const double r = norm_of(y) / a_;
  if (!(r < 1.0)) throw DomainError("phi evaluated at |y| >= a");
  if (r == 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  const double scale = profile(r) / (r * a_);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = scale * y[k];
}

Vec PhiMap::phi(const Vec& y) const {
  Vec out(y.size());
  phi(as_span(y), {out.data(), static_cast<std::size_t>(out.size())});
  return out;
}

double PhiMap::potential(std::span<const double> y) const {
  if (!radial()) return custom_->potential(as_vec(y));
  const double r = norm_of(y) / a_;
  if (r > 1.0) throw DomainError("Phi evaluated at |y| > a");
  return a_ * profile_potential(r);
}

double PhiMap::potential(const Vec& y) const { return potential(as_span(y)); }

void PhiMap::jacobian(std::span<const double> y, std::span<double> jac) const {
  const std::size_t n = y.size();
  if (!radial()) {
    Mat J = jacobian(Vec(as_vec(y)));
    std::copy(J.data(), J.data() + n * n, jac.begin());
    return;
  }
  const double nrm = norm_of(y);
  const double r = nrm / a_;
  if (!(r < 1.0)) throw DomainError("phi jacobian evaluated at |y| >= a");
  if (r == 0.0) {
    const double d = profile_derivative(0.0) / a_;
    std::fill(jac.begin(), jac.end(), 0.0);
    for (std::size_t k = 0; k < n; ++k) jac[k * n + k] = d;
    return;
  }
  // psi'(r) u u^T + psi(r)/r (I - u u^T), scaled by 1/a.
  const double along = profile_derivative(r) / a_;
  const double across = profile(r) / (r * a_);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t k = 0; k < n; ++k) {
      const double uu = y[k] * y[c] / (nrm * nrm);
      jac[c * n + k] = (along - across) * uu + (k == c ? across : 0.0);
    }
  }
}

Mat PhiMap::jacobian(const Vec& y) const {
  const auto n = y.size();
  Mat J(n, n);
  if (radial()) {
    jacobian(as_span(y), {J.data(), static_cast<std::size_t>(n * n)});
    return J;
  }
  if (!(y.norm() < a_)) throw DomainError("phi jacobian evaluated at |y| >= a");
  const double room = a_ - y.norm();
  const double h = std::min(1e-6 * a_, 0.25 * room);
  for (Eigen::Index c = 0; c < n; ++c) {
    Vec yp = y, ym = y;
    yp[c] += h;
    ym[c] -= h;
    J.col(c) = (custom_->phi(yp) - custom_->phi(ym)) / (2.0 * h);
  }
  return J;
}

Vec PhiMap::custom_inverse(const Vec& z) const {
  const double target = z.norm();
  if (target == 0.0) return Vec::Zero(z.size());
  const Vec dir = z / target;
  auto f = [&](double t) { return custom_->phi(t * dir).dot(dir) - target; };
  // Radial Newton with a bisection bracket on [0, a).
  double lo = 0.0, hi = a_ * (1.0 - 1e-15);
  if (f(hi) < 0.0) throw ConvergenceError("custom phi inverse: target outside the range of phi");
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double ft = f(t);
    if (ft > 0.0) hi = t; else lo = t;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (std::abs(ft) <= 1e-14 * (1.0 + target) || hi - lo <= 4 * eps * a_) return t * dir;
    const double h = std::min(1e-7 * a_, 0.5 * (a_ - t));
    const double slope = (f(t + h) - f(t - std::min(h, t))) / (h + std::min(h, t));
    double next = slope > 0.0 ? t - ft / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    // Near the sphere f is steep and its rounding exceeds the value tolerance.
    if (std::abs(next - t) <= 2 * eps * a_) return next * dir;
    t = next;
  }
  throw ConvergenceError("custom phi inverse: radial solve did not converge");
}

Vec PhiMap::inverse(const Vec& z) const {
  if (!radial()) {
    if (custom_->inverse) return custom_->inverse(z);
    return custom_inverse(z);
  }
  const double zeta = z.norm();
  if (zeta == 0.0) return Vec::Zero(z.size());
  const double r = std::min(profile_inverse(zeta), std::nextafter(1.0, 0.0));
  Vec out = (a_ * r / zeta) * z;
  // Large |z| can round onto the sphere |y| = a.
  while (!(out.norm() < a_)) out *= std::nextafter(1.0, 0.0);
  return out;
}

double PhiMap::min_potential(int dim) const {
  double best = potential(Vec::Zero(dim));
  constexpr int kRadial = 2000;
  const int directions = radial() ? 1 : 2 * dim;
  for (int d = 0; d < directions; ++d) {
    Vec e = Vec::Zero(dim);
    e[d / 2] = (d % 2 == 0) ? 1.0 : -1.0;
    for (int k = 1; k <= kRadial; ++k) {
      best = std::min(best, potential(Vec((a_ * k / kRadial) * e)));
    }
  }
  return best;
}

double HypothesisDiagnostics::worst() const {
  return std::max({phi_at_zero, monotonicity, inverse_range, round_trip, gradient, potential_sign,
                   convexity});
}

namespace {

Vec random_in_ball(std::mt19937_64& rng, int dim, double radius) {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif;
  Vec v(dim);
  for (int k = 0; k < dim; ++k) v[k] = gauss(rng);
  const double n = v.norm();
  if (n == 0.0) return Vec::Zero(dim);
  return v * (radius * std::pow(unif(rng), 1.0 / dim) / n);
}

}  // namespace

HypothesisDiagnostics check_hypotheses(const PhiMap& map, int dim, int sample_count,
                                       std::uint64_t seed) {
  if (sample_count < 1) throw DomainError("check_hypotheses needs at least one sample");
  HypothesisDiagnostics d;
  d.samples = sample_count;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif;
  const double a = map.radius();
  const double inf = std::numeric_limits<double>::infinity();

  try {
    d.phi_at_zero = map.phi(Vec::Zero(dim)).norm();
  } catch (const std::exception&) {
    d.phi_at_zero = inf;
  }

  for (int s = 0; s < sample_count; ++s) {
    const Vec y1 = random_in_ball(rng, dim, a * (1.0 - 1e-6));
    const Vec y2 = random_in_ball(rng, dim, a * (1.0 - 1e-6));
    try {
      const double mono = (map.phi(y1) - map.phi(y2)).dot(y1 - y2);
      d.monotonicity = std::max(d.monotonicity, -mono);
    } catch (const std::exception&) {
      d.monotonicity = inf;
    }

    // Convexity and sign on the closed ball.
    const Vec c1 = random_in_ball(rng, dim, a);
    const Vec c2 = random_in_ball(rng, dim, a);
    const double p1 = map.potential(c1), p2 = map.potential(c2);
    const double pm = map.potential(Vec(0.5 * (c1 + c2)));
    d.convexity = std::max(d.convexity, pm - 0.5 * (p1 + p2));
    d.potential_sign = std::max({d.potential_sign, p1, p2});

    // Range and round trip on |z| <= 100.
    Vec z = random_in_ball(rng, dim, 100.0);
    try {
      const Vec y = map.inverse(z);
      d.inverse_range = std::max(d.inverse_range, std::max(0.0, y.norm() - a));
      d.round_trip = std::max(d.round_trip, (map.phi(y) - z).norm() / (1.0 + z.norm()));
    } catch (const std::exception&) {
      d.inverse_range = inf;
      d.round_trip = inf;
    }

    // Fourth-order central differences of Phi at 0.05a <= |y| <= 0.9a.
    Vec dir = random_in_ball(rng, dim, 1.0);
    if (dir.norm() == 0.0) dir = Vec::Unit(dim, 0);
    const Vec y = dir.normalized() * (a * (0.05 + 0.85 * unif(rng)));
    const double h = 2e-4 * a;
    Vec fd(dim);
    for (int k = 0; k < dim; ++k) {
      auto at = [&](double off) {
        Vec q = y;
        q[k] += off;
        return map.potential(q);
      };
      fd[k] = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
    }
    try {
      const Vec ph = map.phi(y);
      d.gradient = std::max(d.gradient, (fd - ph).norm() / (1.0 + ph.norm()));
    } catch (const std::exception&) {
      d.gradient = inf;
    }
  }
  return d;
}

}  // namespace philap
