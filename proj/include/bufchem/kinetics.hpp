#pragma once

// Uptake functions: mu(0) = 0, mu > 0 on (0, inf), and either increasing or
// increasing-then-decreasing around a single peak S_hat.

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string_view>
#include <variant>

namespace bufchem {

struct Monod {
  double mu_max;
  double K_s;
};

struct Haldane {
  double mu_bar;
  double K;
  double K_I;
};

/// User-supplied uptake law. `peak_abscissa` is +inf for increasing laws.
struct CustomUnimodal {
  std::function<double(double)> eval;
  std::function<double(double)> eval_prime;
  double peak_abscissa = std::numeric_limits<double>::infinity();
};

template <typename Scalar>
Scalar monod_rate(const Monod& m, Scalar s) {
  return Scalar(m.mu_max) * s / (Scalar(m.K_s) + s);
}

template <typename Scalar>
Scalar monod_rate_prime(const Monod& m, Scalar s) {
  const Scalar den = Scalar(m.K_s) + s;
  return Scalar(m.mu_max) * Scalar(m.K_s) / (den * den);
}

template <typename Scalar>
Scalar haldane_rate(const Haldane& h, Scalar s) {
  return Scalar(h.mu_bar) * s / (Scalar(h.K) + s + s * s / Scalar(h.K_I));
}

template <typename Scalar>
Scalar haldane_rate_prime(const Haldane& h, Scalar s) {
  const Scalar den = Scalar(h.K) + s + s * s / Scalar(h.K_I);
  return Scalar(h.mu_bar) * (Scalar(h.K) - s * s / Scalar(h.K_I)) / (den * den);
}

template <typename Scalar>
Scalar haldane_rate_second(const Haldane& h, Scalar s) {
  // mu'' = mu_bar * [ -2s/K_I * den - 2 (K - s^2/K_I)(1 + 2s/K_I) ] / den^3
  const Scalar KI = Scalar(h.K_I);
  const Scalar den = Scalar(h.K) + s + s * s / KI;
  const Scalar num = Scalar(-2) * s / KI * den -
                     Scalar(2) * (Scalar(h.K) - s * s / KI) * (Scalar(1) + Scalar(2) * s / KI);
  return Scalar(h.mu_bar) * num / (den * den * den);
}

/// Validated uptake model. Construct through the static factories, which
/// enforce positivity of every parameter and the unimodal shape contract.
class GrowthModel {
 public:
  using Kind = std::variant<Monod, Haldane, CustomUnimodal>;

  static GrowthModel monod(double mu_max, double K_s);
  static GrowthModel haldane(double mu_bar, double K, double K_I);
  /// Shape contract verified by sampling; throws Validation on violation.
  static GrowthModel custom(CustomUnimodal law);

  const Kind& kind() const noexcept { return kind_; }
  std::string_view name() const noexcept;
  const Haldane* as_haldane() const noexcept { return std::get_if<Haldane>(&kind_); }
  const Monod* as_monod() const noexcept { return std::get_if<Monod>(&kind_); }

 private:
  explicit GrowthModel(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

double eval_mu(const GrowthModel& model, double s);
double eval_mu_prime(const GrowthModel& model, double s);
/// Analytic for Monod/Haldane, central difference of mu' for custom laws.
double eval_mu_second(const GrowthModel& model, double s);

struct UnimodalPeak {
  double s_hat;
  double mu_hat;
};

/// nullopt when the law is increasing on (0, inf).
std::optional<UnimodalPeak> peak(const GrowthModel& model);

/// Break-even interval (lambda-, lambda+) where mu > D. `upper` is nullopt
/// when lambda+ is infinite.
struct LambdaInterval {
  double lower;
  std::optional<double> upper;

  bool upper_finite() const noexcept { return upper.has_value(); }
  bool contains(double s) const noexcept { return s > lower && (!upper || s < *upper); }
};

/// Closed forms for Haldane and Monod, bracketed bisection otherwise.
/// Returns nullopt when mu never exceeds D.
std::optional<LambdaInterval> lambda_interval(const GrowthModel& model, double D);

/// Generic route: brackets mu(s) = D on each monotone branch (using only
/// eval_mu and the peak) and bisects to |mu - D| <= 1e-12 D.
std::optional<LambdaInterval> lambda_interval_bisection(const GrowthModel& model, double D);

}  // namespace bufchem
