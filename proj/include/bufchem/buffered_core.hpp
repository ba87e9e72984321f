#pragma once

// Two-tank buffered chemostat. The main tank (volume fraction r) receives the
// direct feed and the buffer outflow; the buffer receives a share of the feed
// scaled by alpha relative to its volume share.

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "bufchem/interval_set.hpp"
#include "bufchem/kinetics.hpp"
#include "bufchem/spectrum.hpp"

namespace bufchem {

struct PhysicalSplit {
  double Q1, Q2, V1, V2;
};

struct BufferedConfig {
  GrowthModel model;
  double S_in;
  double D;
  double alpha;
  double r;
  std::optional<PhysicalSplit> physical;
};

/// Structural invariants: 0 < r < 1, alpha > 0, alpha (1 - r) <= 1, and the
/// physical split (when present) reproducing (D, r, alpha).
void validate(const BufferedConfig& cfg);

/// V1 = 0 (by-pass) and V2 = 0 (single tank) are rejected as Unsupported.
BufferedConfig from_physical(double Q1, double Q2, double V1, double V2, double S_in,
                             const GrowthModel& model);

/// Throws AssumptionViolated naming the failing clause unless the buffer has a
/// positive equilibrium: Lambda(alpha D) non-empty and lambda-(alpha D) < S_in.
void require_a2(const GrowthModel& model, double S_in, double D, double alpha);

/// Which positive buffer state the main-tank hyperbola is built on.
enum class BufferRoot { Lower, Upper };

/// Everything about the hyperbola that does not depend on r. Build it once per
/// (model, S_in, D, alpha) and evaluate phi, f_r and gamma cheaply.
class BufferGeometry {
 public:
  BufferGeometry(const GrowthModel& model, double S_in, double D, double alpha,
                 BufferRoot root = BufferRoot::Lower);
  explicit BufferGeometry(const BufferedConfig& cfg, BufferRoot root = BufferRoot::Lower);

  const GrowthModel& model() const noexcept { return model_; }
  double S_in() const noexcept { return S_in_; }
  double D() const noexcept { return D_; }
  double alpha() const noexcept { return alpha_; }
  double s2_star() const noexcept { return s2_; }
  double underline_s() const noexcept { return ul_s_; }
  /// alpha (S_in - S2*), the feed deficit carried by the buffer outflow.
  double deficit() const noexcept { return deficit_; }

  double phi(double r, double s) const;
  double phi_prime(double r, double s) const;
  double f(double r, double s) const;
  double f_prime(double r, double s) const;

  /// f_r scaled by r (S_in - s) / D: same sign on (0, S_in), no pole.
  double residual(double r, double s) const;
  double residual_prime(double r, double s) const;

  /// True when mu(ul-S) = D within 1e-9 D, i.e. gamma has a removable
  /// singularity at ul-S.
  bool removable_singularity() const noexcept { return removable_; }
  double gamma(double s) const;
  double gamma_prime(double s) const;

 private:
  void require_in_domain(double s) const;

  GrowthModel model_;
  double S_in_, D_, alpha_;
  double s2_ = 0.0, ul_s_ = 0.0, deficit_ = 0.0;
  bool removable_ = false;
  double gamma_at_ul_s_ = 0.0;
};

double s2_star(const BufferedConfig& cfg);
double underline_s(const BufferedConfig& cfg);
double phi_eval(const BufferedConfig& cfg, double s);
double f_r(const BufferedConfig& cfg, double s);
double gamma_eval(const BufferedConfig& cfg, double s);

enum class Branch {
  BufferPositive,  // S2 = lambda-(alpha D)
  BufferWashout,   // S2 = S_in, X2 = 0
  BufferSaddle     // S2 = lambda+(alpha D) < S_in, unstable in the buffer
};

struct EquilibriumB {
  Eigen::Vector4d state;  // (S1, X1, S2, X2)
  Branch branch;
  Eigen::Vector4d eigenvalues = Eigen::Vector4d::Zero();
  StabilityTag tag{};

  double S1() const { return state(0); }
  double X1() const { return state(1); }
  double S2() const { return state(2); }
  double X2() const { return state(3); }
};

/// Zeros of f_r on (0, S_in) by sign scan on a 4096-point grid (8x refined
/// where |residual| < 1e-4), bisection, and a tangency pass on the derivative.
std::vector<double> positive_roots_scan(const BufferGeometry& geo, double r);

/// Haldane only: real roots in (0, S_in) of the equilibrium cubic. A complex
/// pair with negligible imaginary part is reported as a double root.
std::vector<double> positive_roots_cubic(const BufferGeometry& geo, double r);

/// Haldane: cubic roots, cross-checked against the scan (Consistency error on
/// disagreement above 1e-7). Other laws: the scan.
std::vector<double> positive_roots(const BufferGeometry& geo, double r);

/// Connected components of {s in (0, S_in): mu(s) > D phi(s)}.
IntervalSet gamma_region(const BufferedConfig& cfg);

/// Every rest point on the three branches, stability tagged, positive branch
/// first, each branch sorted by S1.
std::vector<EquilibriumB> find_equilibria(const BufferedConfig& cfg);

}  // namespace bufchem
