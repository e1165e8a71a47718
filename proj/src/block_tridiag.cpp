#include <philap/detail/block_tridiag.hpp>

namespace philap::detail {

Mat BlockTridiag::dense() const {
  const int n = blocks(), b = block_size();
  Mat d = Mat::Zero(n * b, n * b);
  for (int k = 0; k < n; ++k) {
    d.block(k * b, k * b, b, b) = diag[static_cast<std::size_t>(k)];
    if (k + 1 < n) {
      d.block(k * b, (k + 1) * b, b, b) = off[static_cast<std::size_t>(k)];
      d.block((k + 1) * b, k * b, b, b) = off[static_cast<std::size_t>(k)].transpose();
    }
  }
  return d;
}

bool BlockTridiagSolver::factor(const BlockTridiag& m) {
  const int n = m.blocks();
  b_ = m.block_size();
  pivots_.clear();
  lower_.assign(static_cast<std::size_t>(n), Mat());
  off_ = m.off;
  pivots_.reserve(static_cast<std::size_t>(n));
  Mat P = m.diag[0];
  for (int k = 0; k < n; ++k) {
    if (k > 0) {
      const Mat& O = m.off[static_cast<std::size_t>(k - 1)];
      Mat L = pivots_.back().solve(O).transpose();
      P = m.diag[static_cast<std::size_t>(k)] - L * O;
      lower_[static_cast<std::size_t>(k)] = std::move(L);
    }
    pivots_.emplace_back(P);
    if (pivots_.back().info() != Eigen::Success) return false;
  }
  return true;
}

Mat BlockTridiagSolver::solve(const Mat& rhs) const {
  const int n = static_cast<int>(pivots_.size());
  const int b = b_;
  Mat y = rhs;
  for (int k = 1; k < n; ++k) {
    y.middleRows(k * b, b) -= lower_[static_cast<std::size_t>(k)] * y.middleRows((k - 1) * b, b);
  }
  Mat x(rhs.rows(), rhs.cols());
  x.middleRows((n - 1) * b, b) = pivots_[static_cast<std::size_t>(n - 1)].solve(
      y.middleRows((n - 1) * b, b));
  for (int k = n - 2; k >= 0; --k) {
    x.middleRows(k * b, b) = pivots_[static_cast<std::size_t>(k)].solve(
        y.middleRows(k * b, b) - off_[static_cast<std::size_t>(k)] * x.middleRows((k + 1) * b, b));
  }
  return x;
}

}  // namespace philap::detail
