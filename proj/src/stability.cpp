#include "bufchem/stability.hpp"

#include <algorithm>
#include <cmath>

#include "bufchem/error.hpp"
#include "bufchem/numeric.hpp"

namespace bufchem {

namespace {

EigenReport make_report(Eigen::Vector4d values, EigenSource source, double D) {
  std::sort(values.data(), values.data() + 4);
  return {values, source, classify_spectrum(values, stability_tolerance(D))};
}

}  // namespace

EigenReport eigenvalues_positive_eq(const BufferedConfig& cfg, const EquilibriumB& eq) {
  if (eq.branch == Branch::BufferWashout) {
    throw Error(ErrorKind::Domain, "equilibrium is not on a positive buffer branch");
  }
  const double D = cfg.D, r = cfg.r, S_in = cfg.S_in;
  const double s1 = eq.S1(), s2 = eq.S2();
  const double gap1 = S_in - s1;
  const double phi_prime = -(1.0 - r) / r * cfg.alpha * (S_in - s2) / (gap1 * gap1);
  const double f_prime = D * phi_prime - eval_mu_prime(cfg.model, s1);
  const Eigen::Vector4d values(-D / r, -cfg.alpha * D, f_prime * gap1,
                               -eval_mu_prime(cfg.model, s2) * (S_in - s2));
  return make_report(values, EigenSource::ClosedForm, D);
}

EigenReport eigenvalues_washout_branch(const BufferedConfig& cfg, double S1_star) {
  const double D = cfg.D, r = cfg.r, S_in = cfg.S_in;
  const double mu_in = eval_mu(cfg.model, S_in);
  const double main = S1_star >= S_in
                          ? mu_in - D / r
                          : -eval_mu_prime(cfg.model, S1_star) * (S_in - S1_star);
  const Eigen::Vector4d values(-D / r, -cfg.alpha * D, main, mu_in - cfg.alpha * D);
  return make_report(values, EigenSource::ClosedForm, D);
}

Eigen::Matrix4d jacobian(const BufferedConfig& cfg, const Eigen::Vector4d& x) {
  const double D = cfg.D, r = cfg.r, alpha = cfg.alpha;
  const double link = D * alpha * (1.0 - r) / r;  // buffer -> main exchange rate
  const double mu1 = eval_mu(cfg.model, x(0)), dmu1 = eval_mu_prime(cfg.model, x(0));
  const double mu2 = eval_mu(cfg.model, x(2)), dmu2 = eval_mu_prime(cfg.model, x(2));
  Eigen::Matrix4d J;
  // clang-format off
  J << -dmu1 * x(1) - D / r, -mu1,         link,                      0.0,
        dmu1 * x(1),          mu1 - D / r,  0.0,                       link,
        0.0,                  0.0,         -dmu2 * x(3) - alpha * D,  -mu2,
        0.0,                  0.0,          dmu2 * x(3),               mu2 - alpha * D;
  // clang-format on
  return J;
}

Eigen::Matrix4d jacobian_zs(const BufferedConfig& cfg, const EquilibriumB& eq) {
  if (eq.branch == Branch::BufferWashout) {
    throw Error(ErrorKind::Domain, "equilibrium is not on a positive buffer branch");
  }
  const double D = cfg.D, r = cfg.r, alpha = cfg.alpha, S_in = cfg.S_in;
  const double link = D * alpha * (1.0 - r) / r;
  const double s1 = eq.S1(), s2 = eq.S2();
  const double gap1 = S_in - s1;
  const double phi_prime = -(1.0 - r) / r * alpha * (S_in - s2) / (gap1 * gap1);
  const double f_prime = D * phi_prime - eval_mu_prime(cfg.model, s1);
  Eigen::Matrix4d J;
  // clang-format off
  J << -D / r,                    link,                     0.0,              0.0,
        0.0,                     -alpha * D,                0.0,              0.0,
       -eval_mu(cfg.model, s1),   0.0,                      f_prime * gap1,   link,
        0.0,                     -eval_mu(cfg.model, s2),   0.0,             -eval_mu_prime(cfg.model, s2) * (S_in - s2);
  // clang-format on
  return J;
}

EigenReport numeric_eig_oracle(const BufferedConfig& cfg, const EquilibriumB& eq) {
  using LD = long double;
  const Eigen::Matrix<LD, 4, 4> J = jacobian(cfg, eq.state).cast<LD>();
  const auto c = characteristic_polynomial<LD>(J);
  const auto roots = numeric::solve_quartic_monic<LD>(c[3], c[2], c[1], c[0]);

  Eigen::Vector4d values;
  for (int i = 0; i < 4; ++i) values(i) = static_cast<double>(roots[i].real());
  auto rep = make_report(values, EigenSource::NumericOracle, cfg.D);
  const LD sep_floor = LD(1e-12) * std::max<LD>(1, J.cwiseAbs().maxCoeff());
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      if (std::abs(roots[i] - roots[j]) < sep_floor) rep.ill_conditioned = true;
    }
  }
  return rep;
}

}  // namespace bufchem
