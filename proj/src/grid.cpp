#include <philap/grid.hpp>

#include <philap/errors.hpp>

#include <cmath>

namespace philap {

Grid Grid::make(double T, int M) {
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("grid length T must be positive");
  if (M < 2) throw DomainError("grid needs M >= 2 intervals");
  return {T, M};
}

Vec Grid::weights() const {
  Vec w = Vec::Constant(M + 1, dt());
  w[0] *= 0.5;
  w[M] *= 0.5;
  return w;
}

GridFunction GridFunction::zeros(const Grid& g, int N) {
  return {g, NodeMat::Zero(g.M + 1, N)};
}

GridFunction GridFunction::constant(const Grid& g, const Vec& c) {
  GridFunction u = zeros(g, static_cast<int>(c.size()));
  u.values.rowwise() = c.transpose();
  return u;
}

GridFunction GridFunction::sample(const Grid& g, int N, const std::function<Vec(double)>& f) {
  GridFunction u = zeros(g, N);
  for (int i = 0; i <= g.M; ++i) u.values.row(i) = f(g.node(i)).transpose();
  return u;
}

double sup_distance(const GridFunction& u, const GridFunction& v) {
  if (u.values.rows() != v.values.rows() || u.values.cols() != v.values.cols()) {
    throw DomainError("sup_distance: grid functions have different shapes");
  }
  return (u.values - v.values).rowwise().norm().maxCoeff();
}

}  // namespace philap
