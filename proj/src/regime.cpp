#include <philap/regime.hpp>

#include <algorithm>

namespace philap {

std::string to_string(RegimeFlag f) {
  switch (f) {
    case RegimeFlag::Lambda1Positive: return "Lambda1Positive";
    case RegimeFlag::ConeDiagonalTrivial: return "ConeDiagonalTrivial";
    case RegimeFlag::BoundedProjection: return "BoundedProjection";
    case RegimeFlag::PeriodicReduction: return "PeriodicReduction";
    case RegimeFlag::AntiCoercive: return "AntiCoercive";
    case RegimeFlag::SemiCoerciveSaddle: return "SemiCoerciveSaddle";
    case RegimeFlag::CoerciveLess: return "CoerciveLess";
    case RegimeFlag::CoercivePlus: return "CoercivePlus";
    case RegimeFlag::Unknown: return "Unknown";
  }
  return "Unknown";
}

bool RegimeReport::has(RegimeFlag f) const {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

}  // namespace philap
