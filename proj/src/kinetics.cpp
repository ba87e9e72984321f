#include "bufchem/kinetics.hpp"

#include <cmath>
#include <string>

#include "bufchem/error.hpp"
#include "bufchem/numeric.hpp"

namespace bufchem {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorKind::Validation,
                std::string("parameter ") + name + " must be strictly positive");
  }
}

void require_nonnegative_s(double s) {
  if (!(s >= 0.0)) throw Error(ErrorKind::Domain, "substrate concentration must be >= 0");
}

}  // namespace

GrowthModel GrowthModel::monod(double mu_max, double K_s) {
  require_positive(mu_max, "mu_max");
  require_positive(K_s, "K_s");
  return GrowthModel(Monod{mu_max, K_s});
}

GrowthModel GrowthModel::haldane(double mu_bar, double K, double K_I) {
  require_positive(mu_bar, "mu_bar");
  require_positive(K, "K");
  require_positive(K_I, "K_I");
  return GrowthModel(Haldane{mu_bar, K, K_I});
}

GrowthModel GrowthModel::custom(CustomUnimodal law) {
  if (!law.eval || !law.eval_prime) {
    throw Error(ErrorKind::Validation, "custom growth law needs eval and eval_prime");
  }
  if (!(law.peak_abscissa > 0.0)) {
    throw Error(ErrorKind::Validation, "parameter peak_abscissa must be strictly positive");
  }
  if (law.eval(0.0) != 0.0) throw Error(ErrorKind::Validation, "custom growth law: mu(0) != 0");

  // shape contract by sampling: positive, increasing up to the peak, then
  // decreasing; samples are geometric so both small and large s are seen
  const double p = law.peak_abscissa;
  const double ref = std::isfinite(p) ? p : 1.0;
  double prev_s = 0.0, prev_mu = 0.0;
  for (int k = -400; k <= 400; ++k) {
    const double s = ref * std::pow(2.0, k / 20.0);
    const double m = law.eval(s);
    if (!(m > 0.0) || !std::isfinite(m)) {
      throw Error(ErrorKind::Validation, "custom growth law: mu(s) must be positive for s > 0");
    }
    const bool rising_part = s <= p;
    if (prev_s > 0.0) {
      if (rising_part && !(m > prev_mu)) {
        throw Error(ErrorKind::Validation,
                    "custom growth law: not increasing left of peak_abscissa");
      }
      if (prev_s >= p && !(m < prev_mu)) {
        throw Error(ErrorKind::Validation,
                    "custom growth law: not decreasing right of peak_abscissa");
      }
    }
    prev_s = s;
    prev_mu = m;
  }
  return GrowthModel(std::move(law));
}

std::string_view GrowthModel::name() const noexcept {
  return std::visit(Overloaded{[](const Monod&) { return std::string_view("monod"); },
                               [](const Haldane&) { return std::string_view("haldane"); },
                               [](const CustomUnimodal&) { return std::string_view("custom"); }},
                    kind_);
}

double eval_mu(const GrowthModel& model, double s) {
  require_nonnegative_s(s);
  return std::visit(Overloaded{[s](const Monod& m) { return monod_rate(m, s); },
                               [s](const Haldane& h) { return haldane_rate(h, s); },
                               [s](const CustomUnimodal& c) { return c.eval(s); }},
                    model.kind());
}

double eval_mu_prime(const GrowthModel& model, double s) {
  require_nonnegative_s(s);
  return std::visit(Overloaded{[s](const Monod& m) { return monod_rate_prime(m, s); },
                               [s](const Haldane& h) { return haldane_rate_prime(h, s); },
                               [s](const CustomUnimodal& c) { return c.eval_prime(s); }},
                    model.kind());
}

double eval_mu_second(const GrowthModel& model, double s) {
  require_nonnegative_s(s);
  return std::visit(
      Overloaded{[s](const Monod& m) {
                   const double den = m.K_s + s;
                   return -2.0 * m.mu_max * m.K_s / (den * den * den);
                 },
                 [s](const Haldane& h) { return haldane_rate_second(h, s); },
                 [s](const CustomUnimodal& c) {
                   const double h = 1e-5 * std::max(1.0, s);
                   if (s >= h) return (c.eval_prime(s + h) - c.eval_prime(s - h)) / (2.0 * h);
                   return (c.eval_prime(s + h) - c.eval_prime(s)) / h;
                 }},
      model.kind());
}

std::optional<UnimodalPeak> peak(const GrowthModel& model) {
  if (const auto* h = model.as_haldane()) {
    const double s_hat = std::sqrt(h->K * h->K_I);
    return UnimodalPeak{s_hat, haldane_rate(*h, s_hat)};
  }
  if (const auto* c = std::get_if<CustomUnimodal>(&model.kind())) {
    if (std::isfinite(c->peak_abscissa)) {
      return UnimodalPeak{c->peak_abscissa, c->eval(c->peak_abscissa)};
    }
  }
  return std::nullopt;
}

std::optional<LambdaInterval> lambda_interval(const GrowthModel& model, double D) {
  if (!(D > 0.0)) throw Error(ErrorKind::Domain, "dilution rate must be > 0");
  if (const auto* h = model.as_haldane()) {
    const double ratio = h->mu_bar / D;
    if (!(ratio > 1.0 + 2.0 * std::sqrt(h->K / h->K_I))) return std::nullopt;
    const double a = h->K_I * (ratio - 1.0);
    const double disc = a * a - 4.0 * h->K * h->K_I;
    const double upper = 0.5 * (a + std::sqrt(std::max(disc, 0.0)));
    // product of the roots is K K_I; avoids cancellation in the lower root
    return LambdaInterval{h->K * h->K_I / upper, upper};
  }
  if (const auto* m = model.as_monod()) {
    if (!(D < m->mu_max)) return std::nullopt;
    return LambdaInterval{m->K_s * D / (m->mu_max - D), std::nullopt};
  }
  return lambda_interval_bisection(model, D);
}

std::optional<LambdaInterval> lambda_interval_bisection(const GrowthModel& model, double D) {
  if (!(D > 0.0)) throw Error(ErrorKind::Domain, "dilution rate must be > 0");
  auto excess = [&](double s) { return eval_mu(model, s) - D; };
  const auto top = peak(model);

  if (!top) {
    double hi = 1.0;
    for (int k = 0; k < 400 && !(excess(hi) > 0.0); ++k) hi *= 2.0;
    if (!(excess(hi) > 0.0)) return std::nullopt;
    return LambdaInterval{numeric::bisect<double>(excess, 0.0, hi), std::nullopt};
  }

  if (!(top->mu_hat > D)) return std::nullopt;
  const double lower = numeric::bisect<double>(excess, 0.0, top->s_hat);
  double hi = 2.0 * top->s_hat;
  for (int k = 0; k < 200 && excess(hi) > 0.0; ++k) hi *= 2.0;
  if (excess(hi) > 0.0) return LambdaInterval{lower, std::nullopt};
  return LambdaInterval{lower, numeric::bisect<double>(excess, top->s_hat, hi)};
}

}  // namespace bufchem
