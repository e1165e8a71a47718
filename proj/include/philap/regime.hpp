#pragma once

#include <optional>
#include <string>
#include <vector>

namespace philap {

enum class RegimeFlag {
  Lambda1Positive,
  ConeDiagonalTrivial,
  BoundedProjection,
  PeriodicReduction,
  AntiCoercive,
  SemiCoerciveSaddle,
  CoerciveLess,
  CoercivePlus,
  Unknown,
};

std::string to_string(RegimeFlag f);

/// Sampled values of x -> int_0^T F(t, x) dt along one ray.
struct RadialEvidence {
  std::vector<double> direction;
  std::vector<double> radii;
  std::vector<double> integral_F;
  std::vector<double> max_F;  // max over t of F(t, x)
  std::vector<double> min_F;  // min over t of F(t, x)
};

struct RegimeReport {
  std::optional<double> lambda1;
  std::vector<RegimeFlag> flags;
  std::vector<RadialEvidence> evidence;
  double quadrature_noise = 0.0;
  double threshold = 0.0;  // 10 x quadrature noise
  double phi_gap = 0.0;    // min Phi - Phi(0)

  bool has(RegimeFlag f) const;
};

}  // namespace philap
