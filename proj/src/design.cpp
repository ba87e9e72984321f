#include "bufchem/design.hpp"

#include <algorithm>
#include <cmath>

#include "bufchem/error.hpp"
#include "bufchem/numeric.hpp"
#include "bufchem/parallel.hpp"

namespace bufchem {

namespace {

constexpr std::size_t kDesignGrid = 2048;
constexpr double kDesignXtol = 1e-10;

void require_s_in(double S_in) {
  if (!(S_in > 0.0)) throw Error(ErrorKind::Validation, "S_in must be > 0");
}

void require_in_range(double S_in, double s) {
  if (!(s >= 0.0 && s <= S_in)) throw Error(ErrorKind::Domain, "s must lie in [0, S_in]");
}

template <typename F>
numeric::MinimumPoint<double> maximise(F&& f, double lo, double hi) {
  auto m = numeric::grid_minimize<double>([&](double s) { return -f(s); }, lo, hi, kDesignGrid,
                                          kDesignXtol);
  return {m.x, -m.value};
}

}  // namespace

double min_extra_volume_scenario1(const GrowthModel& model, double S_in, double D) {
  require_s_in(S_in);
  if (!(D > 0.0)) throw Error(ErrorKind::Validation, "D must be > 0");
  return std::max(0.0, D / eval_mu(model, S_in) - 1.0);
}

double design_varphi(const GrowthModel& model, double S_in, double D, double s) {
  require_in_range(S_in, s);
  return (S_in - s) * (D - eval_mu(model, s));
}

double design_psi(const GrowthModel& model, double S_in, double s) {
  require_in_range(S_in, s);
  return eval_mu(model, s) * (S_in - s);
}

DesignReport::DesignReport(GrowthModel model, double S_in, double D)
    : model_(std::move(model)), S_in_(S_in), D_(D) {
  require_s_in(S_in);
  if (!(D > 0.0)) throw Error(ErrorKind::Validation, "D must be > 0");
  const auto lam = lambda_interval(model_, D);
  if (!lam) throw Error(ErrorKind::AssumptionViolated, "design needs Lambda(D) non-empty");
  if (!lam->upper || !(*lam->upper < S_in)) {
    throw Error(ErrorKind::AssumptionViolated, "design needs lambda+(D) < S_in");
  }
  const double mu_in = eval_mu(model_, S_in);
  const auto top = peak(model_);
  if (!top || !(mu_in < top->mu_hat)) {
    throw Error(ErrorKind::AssumptionViolated, "design needs mu(S_in) below the peak rate");
  }

  delta_v_inf_ = min_extra_volume_scenario1(model_, S_in, D);
  s_bar_ = lambda_interval(model_, mu_in)->lower;
  varphi_max_ =
      maximise([&](double s) { return design_varphi(model_, S_in, D, s); }, *lam->upper, S_in)
          .value;
  const auto psi = maximise([&](double s) { return design_psi(model_, S_in, s); }, 0.0, s_bar_);
  // the closed end s_bar is admissible too
  const double psi_end = design_psi(model_, S_in, s_bar_);
  const double s_psi = psi_end > psi.value ? s_bar_ : psi.x;
  psi_max_ = std::max(psi.value, psi_end);
  d2_star_ = eval_mu(model_, s_psi);
  v2_inf_ = varphi_max_ / psi_max_;
}

IntervalSet DesignReport::d2_interval_for(double v2) const {
  if (!(v2 > 0.0)) throw Error(ErrorKind::Domain, "v2 must be > 0");
  // work in s = lambda-(D2) on (0, s_bar), where D2 = mu(s) is increasing
  auto margin = [&](double s) {
    const double load = v2 * design_psi(model_, S_in_, s);
    return std::min({load - varphi_max_, D_ * S_in_ - load, D_ / v2 - eval_mu(model_, s)});
  };
  std::vector<OpenInterval> pieces;
  const double step = s_bar_ / double(kDesignGrid + 1);
  double a = 0.0, ma = margin(a);
  double start = ma > 0.0 ? 0.0 : -1.0;
  for (std::size_t k = 1; k <= kDesignGrid + 1; ++k) {
    const double b = step * double(k);
    const double mb = margin(b);
    if ((ma > 0.0) != (mb > 0.0)) {
      const double edge = numeric::bisect<double>(margin, a, b);
      if (mb > 0.0) {
        start = edge;
      } else {
        pieces.push_back({eval_mu(model_, start), eval_mu(model_, edge)});
        start = -1.0;
      }
    }
    a = b;
    ma = mb;
  }
  if (start >= 0.0) pieces.push_back({eval_mu(model_, start), eval_mu(model_, s_bar_)});
  return IntervalSet(std::move(pieces));
}

BufferedConfig DesignReport::buffered_config(double v2, double D2) const {
  const double D_total = D_ / (1.0 + v2);
  BufferedConfig cfg{model_, S_in_, D_total, D2 / D_total, 1.0 / (1.0 + v2), std::nullopt};
  validate(cfg);
  return cfg;
}

DesignReport min_buffer_volume_scenario2(const GrowthModel& model, double S_in, double D) {
  return DesignReport(model, S_in, D);
}

std::vector<DesignRow> design_sweep(const GrowthModel& model, double D,
                                    const std::vector<double>& S_in_grid) {
  std::vector<DesignRow> rows(S_in_grid.size());
  parallel_for(S_in_grid.size(), [&](std::size_t i) {
    const auto rep = min_buffer_volume_scenario2(model, S_in_grid[i], D);
    rows[i] = {S_in_grid[i], rep.delta_v_inf(), rep.v2_inf()};
  });
  return rows;
}

}  // namespace bufchem
