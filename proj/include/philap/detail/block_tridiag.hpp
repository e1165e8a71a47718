#pragma once

#include <philap/types.hpp>

#include <vector>

namespace philap::detail {

/// Symmetric block tridiagonal matrix with n diagonal blocks of size b x b.
/// off[k] is the (k, k+1) block; the (k+1, k) block is its transpose.
struct BlockTridiag {
  std::vector<Mat> diag;
  std::vector<Mat> off;

  int blocks() const { return static_cast<int>(diag.size()); }
  int block_size() const { return diag.empty() ? 0 : static_cast<int>(diag.front().rows()); }
  /// Dense copy, for tests.
  Mat dense() const;
};

/// Block Cholesky elimination. solve() handles any number of right-hand sides
/// stacked block-row-wise (n b x r).
class BlockTridiagSolver {
 public:
  /// Returns false if a pivot block is not positive definite.
  bool factor(const BlockTridiag& m);
  Mat solve(const Mat& rhs) const;

 private:
  std::vector<Eigen::LLT<Mat>> pivots_;
  std::vector<Mat> lower_;  // L_k = off[k-1]^T P_{k-1}^{-1}
  std::vector<Mat> off_;
  int b_ = 0;
};

}  // namespace philap::detail
