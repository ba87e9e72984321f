#pragma once

// Linearisation at rest points of the buffered chemostat. The closed forms
// come from the block-triangular Jacobian in (Z1, Z2, S1, S2) coordinates,
// Z_i = S_i + X_i - S_in; the numeric oracle works on the full Jacobian in
// (S1, X1, S2, X2) coordinates through its characteristic polynomial.

#include <array>
#include <complex>

#include <Eigen/Core>

#include "bufchem/buffered_core.hpp"
#include "bufchem/spectrum.hpp"

namespace bufchem {

enum class EigenSource { ClosedForm, NumericOracle };

struct EigenReport {
  Eigen::Vector4d values;  // real parts
  EigenSource source;
  StabilityTag tag;
  bool ill_conditioned = false;  // oracle only: two roots closer than 1e-12
};

inline double stability_tolerance(double D) { return 1e-9 * D; }

/// Positive-buffer equilibria (BufferPositive and BufferSaddle branches).
EigenReport eigenvalues_positive_eq(const BufferedConfig& cfg, const EquilibriumB& eq);

/// Rest points (S1*, S_in - S1*, S_in, 0) with S1* in {lambda-+(D/r), S_in}.
EigenReport eigenvalues_washout_branch(const BufferedConfig& cfg, double S1_star);

/// Jacobian of the vector field in (S1, X1, S2, X2) at an arbitrary state.
Eigen::Matrix4d jacobian(const BufferedConfig& cfg, const Eigen::Vector4d& state);

/// Jacobian at a positive-buffer equilibrium in (Z1, Z2, S1, S2) coordinates.
Eigen::Matrix4d jacobian_zs(const BufferedConfig& cfg, const EquilibriumB& eq);

/// Coefficients c0..c3 of det(x I - A) = x^4 + c3 x^3 + c2 x^2 + c1 x + c0
/// by the Faddeev-LeVerrier recursion.
template <typename Scalar>
std::array<Scalar, 4> characteristic_polynomial(const Eigen::Matrix<Scalar, 4, 4>& A) {
  using Mat = Eigen::Matrix<Scalar, 4, 4>;
  std::array<Scalar, 4> c{};
  Mat M = Mat::Identity();
  Scalar coeff = Scalar(1);
  for (int k = 1; k <= 4; ++k) {
    const Mat AM = A * M;
    coeff = -AM.trace() / Scalar(k);
    c[4 - k] = coeff;
    M = AM + coeff * Mat::Identity();
  }
  return c;
}

/// Eigenvalues from the characteristic polynomial, solved in long double.
EigenReport numeric_eig_oracle(const BufferedConfig& cfg, const EquilibriumB& eq);

}  // namespace bufchem
