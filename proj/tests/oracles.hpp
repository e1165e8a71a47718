#pragma once

// Independent reference computations used only by the tests. Nothing here calls the
// library's solvers; formulas for phi are restated, and linear algebra is dense.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline const double kPi = std::acos(-1.0);

/// Scalar radial generator: relativistic (p = 2 form) or p-relativistic, radius a.
struct Phi1D {
  double a = 1.0;
  double p = 2.0;
  bool relativistic = true;

  double phi(double y) const {
    const double r = std::abs(y) / a;
    const double s = y < 0 ? -1.0 : 1.0;
    if (relativistic) return s * r / std::sqrt(1.0 - r * r);
    return s * std::pow(r, p - 1.0) * std::pow(1.0 - std::pow(r, p), 1.0 / p - 1.0);
  }
  double dphi(double y) const {
    const double r = std::abs(y) / a;
    if (relativistic) return std::pow(1.0 - r * r, -1.5) / a;
    const double q = 1.0 - std::pow(r, p);
    return (p - 1.0) * std::pow(r, p - 2.0) * std::pow(q, 1.0 / p - 2.0) / a;
  }
  double potential(double y) const {
    const double r = std::abs(y) / a;
    if (relativistic) return -a * std::sqrt(1.0 - r * r);
    return -a * std::pow(1.0 - std::pow(r, p), 1.0 / p);
  }
};

/// Inverse of an increasing odd map onto R by bisection on (-a, a).
inline double bisect_inverse(const std::function<double(double)>& f, double z, double a) {
  double lo = -a, hi = a;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (f(mid) < z) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// Boundary rows of the collocation system for the scalar auxiliary problem.
enum class Bc { Neumann, Dirichlet, Periodic };

/// Dense Newton solve of the scalar auxiliary scheme
///   -(phi(D_i) - phi(D_{i-1})) / dt + u_i = h_i   (interior),
/// with Neumann rows phi(D_0) + dt/2 (h_0 - u_0) = x, phi(D_{M-1}) - dt/2 (h_M - u_M) = y,
/// Dirichlet rows u_0 = x, u_M = y, or periodic rows u_0 = u_M and equal end fluxes.
inline Vec collocation(const Phi1D& phi, const Vec& h, double T, Bc bc, double x, double y,
                       int max_iter = 100) {
  const int m = static_cast<int>(h.size()) - 1;
  const double dt = T / m;
  Vec u = Vec::Zero(m + 1);
  if (bc == Bc::Dirichlet) {
    for (int i = 0; i <= m; ++i) u[i] = x + (y - x) * i / m;
  }
  for (int it = 0; it < max_iter; ++it) {
    Vec D(m), F(m + 1);
    for (int i = 0; i < m; ++i) D[i] = (u[i + 1] - u[i]) / dt;
    Vec P(m), dP(m);
    for (int i = 0; i < m; ++i) {
      P[i] = phi.phi(D[i]);
      dP[i] = phi.dphi(D[i]);
    }
    Mat J = Mat::Zero(m + 1, m + 1);
    for (int i = 1; i < m; ++i) {
      F[i] = -(P[i] - P[i - 1]) / dt + u[i] - h[i];
      J(i, i) = 1.0 + (dP[i] + dP[i - 1]) / (dt * dt);
      J(i, i + 1) = -dP[i] / (dt * dt);
      J(i, i - 1) = -dP[i - 1] / (dt * dt);
    }
    const double p0 = P[0] + 0.5 * dt * (h[0] - u[0]);
    const double pT = P[m - 1] - 0.5 * dt * (h[m] - u[m]);
    switch (bc) {
      case Bc::Neumann:
        F[0] = p0 - x;
        J(0, 0) = -dP[0] / dt - 0.5 * dt;
        J(0, 1) = dP[0] / dt;
        F[m] = pT - y;
        J(m, m) = dP[m - 1] / dt + 0.5 * dt;
        J(m, m - 1) = -dP[m - 1] / dt;
        break;
      case Bc::Dirichlet:
        F[0] = u[0] - x;
        J(0, 0) = 1.0;
        F[m] = u[m] - y;
        J(m, m) = 1.0;
        break;
      case Bc::Periodic:
        F[0] = u[0] - u[m];
        J(0, 0) = 1.0;
        J(0, m) = -1.0;
        F[m] = p0 - pT;
        J(m, 0) = -dP[0] / dt - 0.5 * dt;
        J(m, 1) = dP[0] / dt;
        J(m, m) = -dP[m - 1] / dt - 0.5 * dt;
        J(m, m - 1) += dP[m - 1] / dt;
        break;
    }
    if (F.lpNorm<Eigen::Infinity>() < 1e-13) break;
    Vec step = J.partialPivLu().solve(-F);
    double t = 1.0;
    // Keep |D| < a.
    for (int k = 0; k < 60; ++k) {
      const Vec trial = u + t * step;
      bool ok = true;
      for (int i = 0; i < m && ok; ++i) ok = std::abs(trial[i + 1] - trial[i]) / dt < phi.a;
      if (ok) break;
      t *= 0.5;
    }
    u += t * step;
  }
  return u;
}

/// Minimizes  val(x, y) + ((x - cx)^2 + (y - cy)^2) / (2 lambda)  over the grid
/// (cx + i hgrid, cy + k hgrid), |i|, |k| <= half; val returns +inf off the domain.
inline std::pair<double, double> grid_prox(const std::function<double(double, double)>& val,
                                           double cx, double cy, double lambda, double hgrid,
                                           int half) {
  double best = std::numeric_limits<double>::infinity();
  std::pair<double, double> arg{cx, cy};
  for (int i = -half; i <= half; ++i) {
    const double x = cx + i * hgrid;
    for (int k = -half; k <= half; ++k) {
      const double y = cy + k * hgrid;
      const double v = val(x, y);
      if (!std::isfinite(v)) continue;
      const double e = v + ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (2.0 * lambda);
      if (e < best) {
        best = e;
        arg = {x, y};
      }
    }
  }
  return arg;
}

/// Separation test for xi in N_K(z): samples w in K near z at radii 1, 0.1, 0.01, 0.001 and
/// reports whether max <xi | w - z> / |w - z| stays below tol. `sample_in_K` must return
/// points of K within the given distance of z.
inline bool cone_by_separation(
    const std::function<std::pair<Vec, Vec>(const Vec&, const Vec&, double, std::mt19937_64&)>&
        sample_in_K,
    const Vec& zx, const Vec& zy, const Vec& xx, const Vec& xy, int samples, std::uint64_t seed,
    double tol) {
  std::mt19937_64 rng(seed);
  const double radii[] = {1.0, 0.1, 0.01, 0.001};
  for (int s = 0; s < samples; ++s) {
    const double r = radii[s % 4];
    const auto [wx, wy] = sample_in_K(zx, zy, r, rng);
    const double d = std::sqrt((wx - zx).squaredNorm() + (wy - zy).squaredNorm());
    if (d == 0.0) continue;
    const double ip = xx.dot(wx - zx) + xy.dot(wy - zy);
    if (ip / d > tol) return false;
  }
  return true;
}

/// Smallest generalized eigenvalue of K v = lambda W v over a subspace given by a basis B
/// (columns), for the piecewise-linear stiffness K and lumped mass W on a uniform grid.
inline double lambda1_dense(double T, int m, const Mat& B) {
  const double dt = T / m;
  Mat K = Mat::Zero(m + 1, m + 1), W = Mat::Zero(m + 1, m + 1);
  for (int i = 0; i < m; ++i) {
    K(i, i) += 1.0 / dt;
    K(i + 1, i + 1) += 1.0 / dt;
    K(i, i + 1) -= 1.0 / dt;
    K(i + 1, i) -= 1.0 / dt;
  }
  for (int i = 0; i <= m; ++i) W(i, i) = (i == 0 || i == m) ? dt / 2 : dt;
  const Mat Kr = B.transpose() * K * B;
  const Mat Wr = B.transpose() * W * B;
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(Kr, Wr);
  return es.eigenvalues().minCoeff();
}

/// Basis of scalar grid functions whose endpoints satisfy alpha u_0 = beta u_M
/// (alpha = beta = 0 means free endpoints; "point" means u_0 = u_M = 0).
inline Mat endpoint_basis(int m, const std::string& kind) {
  std::vector<Vec> cols;
  for (int i = 1; i < m; ++i) cols.push_back(Vec::Unit(m + 1, i));
  if (kind == "free") {
    cols.push_back(Vec::Unit(m + 1, 0));
    cols.push_back(Vec::Unit(m + 1, m));
  } else if (kind == "diagonal") {
    cols.push_back(Vec::Unit(m + 1, 0) + Vec::Unit(m + 1, m));
  } else if (kind == "anti") {
    cols.push_back(Vec::Unit(m + 1, 0) - Vec::Unit(m + 1, m));
  }
  Mat B(m + 1, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) B.col(static_cast<Eigen::Index>(c)) = cols[c];
  return B;
}

}  // namespace oracle
