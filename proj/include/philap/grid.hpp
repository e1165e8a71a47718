#pragma once

#include <philap/types.hpp>

#include <functional>

namespace philap {

/// Node-major storage: row i holds u(t_i).
using NodeMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Uniform grid t_i = i T / M on [0, T].
struct Grid {
  double T = 1.0;
  int M = 2;

  static Grid make(double T, int M);

  double dt() const { return T / M; }
  double node(int i) const { return i == M ? T : T * i / M; }
  double midpoint(int i) const { return T * (i + 0.5) / M; }
  /// Trapezoid weights (dt/2, dt, ..., dt, dt/2).
  Vec weights() const;
};

struct GridFunction {
  Grid grid;
  NodeMat values;  // (M + 1) x N

  static GridFunction zeros(const Grid& g, int N);
  static GridFunction constant(const Grid& g, const Vec& c);
  static GridFunction sample(const Grid& g, int N, const std::function<Vec(double)>& f);

  int dim() const { return static_cast<int>(values.cols()); }
  int intervals() const { return grid.M; }
  Vec node(int i) const { return values.row(i).transpose(); }
  EndpointPair endpoints() const { return {node(0), node(grid.M)}; }
  double sup_norm() const { return values.rowwise().norm().maxCoeff(); }
};

/// max_i |u_i - v_i| over nodes (Euclidean in each node).
double sup_distance(const GridFunction& u, const GridFunction& v);

}  // namespace philap
