#pragma once

#include <cmath>

#include <Eigen/Core>

namespace bufchem {

enum class StabilityKind { Stable, Saddle, NonHyperbolic };

struct StabilityTag {
  StabilityKind kind = StabilityKind::NonHyperbolic;
  int unstable_dim = 0;  // only meaningful for Saddle

  friend bool operator==(const StabilityTag&, const StabilityTag&) = default;
};

/// Tag from real parts: NonHyperbolic if any |value| <= tol, Stable if all
/// are below -tol, otherwise Saddle(k) with k values above tol.
template <typename Derived>
StabilityTag classify_spectrum(const Eigen::MatrixBase<Derived>& real_parts, double tol) {
  int unstable = 0;
  for (Eigen::Index i = 0; i < real_parts.size(); ++i) {
    const double v = real_parts(i);
    if (std::abs(v) <= tol) return {StabilityKind::NonHyperbolic, 0};
    if (v > tol) ++unstable;
  }
  if (unstable == 0) return {StabilityKind::Stable, 0};
  return {StabilityKind::Saddle, unstable};
}

}  // namespace bufchem
