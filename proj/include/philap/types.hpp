#pragma once

#include <Eigen/Dense>

#include <span>

namespace philap {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline Eigen::Map<const Vec> as_vec(std::span<const double> s) {
  return {s.data(), static_cast<Eigen::Index>(s.size())};
}

inline Eigen::Map<Vec> as_vec(std::span<double> s) {
  return {s.data(), static_cast<Eigen::Index>(s.size())};
}

inline std::span<const double> as_span(const Vec& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

/// A point of R^N x R^N, usually (u(0), u(T)) or a covector pair.
struct EndpointPair {
  Vec x;
  Vec y;

  int dim() const { return static_cast<int>(x.size()); }

  Vec stacked() const {
    Vec s(x.size() + y.size());
    s << x, y;
    return s;
  }

  static EndpointPair from_stacked(const Vec& s) {
    const auto n = s.size() / 2;
    return {s.head(n), s.tail(n)};
  }

  static EndpointPair zero(int n) { return {Vec::Zero(n), Vec::Zero(n)}; }
};

inline double inner(const EndpointPair& a, const EndpointPair& b) {
  return a.x.dot(b.x) + a.y.dot(b.y);
}

inline double norm(const EndpointPair& a) { return std::sqrt(inner(a, a)); }

}  // namespace philap
