#include "bufchem/multiplicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "bufchem/error.hpp"
#include "bufchem/numeric.hpp"
#include "bufchem/parallel.hpp"

namespace bufchem {

namespace {

constexpr std::size_t kGammaGrid = 2048;
constexpr double kGammaXtol = 1e-10;
constexpr double kSub2Tol = 1e-9;

std::optional<RRange> extrema_range(const BufferGeometry& geo, double lo, double hi) {
  if (!(hi > lo)) return std::nullopt;
  const auto ext = numeric::local_extrema<double>([&](double s) { return geo.gamma(s); }, lo, hi,
                                                  kGammaGrid, kGammaXtol);
  if (ext.empty()) return std::nullopt;
  RRange out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& e : ext) {
    out.first = std::min(out.first, e.value);
    out.second = std::max(out.second, e.value);
  }
  return out;
}

double min_gamma(const BufferGeometry& geo, double lo, double hi) {
  return numeric::grid_minimize<double>([&](double s) { return geo.gamma(s); }, lo, hi,
                                        kGammaGrid, kGammaXtol)
      .value;
}

bool is_case_two(const std::optional<LambdaInterval>& lam, double S_in) {
  return lam && lam->lower < S_in && lam->upper && *lam->upper < S_in;
}

MultiplicityCase case_from(const std::optional<LambdaInterval>& lam, double S_in, double ul_s) {
  if (!is_case_two(lam, S_in)) return MultiplicityCase::CaseI;
  const double up = *lam->upper;
  if (std::abs(ul_s - up) <= kSub2Tol) return MultiplicityCase::CaseII_sub2;
  return ul_s < up ? MultiplicityCase::CaseII_sub1 : MultiplicityCase::CaseII_sub3;
}

// Tangency defect in (c, s) with c = (1 - r)/r:
//   e1 = mu/D - phi,  e2 = mu'/D - phi'.
struct Defect {
  Eigen::Vector2d e;
  Eigen::Matrix2d J;
};

Defect tangency_defect(const BufferGeometry& geo, double c, double s) {
  const double D = geo.D(), A = geo.deficit();
  const double g = geo.S_in() - s;
  const double u = 1.0 - A / g;
  const double v = A / (g * g);
  const double m = eval_mu(geo.model(), s) / D;
  const double mp = eval_mu_prime(geo.model(), s) / D;
  const double mpp = eval_mu_second(geo.model(), s) / D;
  Defect d;
  d.e << m - 1.0 - c * u, mp + c * v;
  d.J << -u, mp + c * v, v, mpp + c * 2.0 * A / (g * g * g);
  return d;
}

struct Candidate {
  double c, s, F;
};

Candidate levenberg_marquardt(const BufferGeometry& geo, double c, double s, double lo,
                              double hi) {
  Defect d = tangency_defect(geo, c, s);
  double F = d.e.squaredNorm();
  double lambda = 1e-3;
  for (int it = 0; it < 300 && F > 1e-32; ++it) {
    const Eigen::Matrix2d JtJ = d.J.transpose() * d.J;
    const Eigen::Vector2d g = d.J.transpose() * d.e;
    Eigen::Matrix2d M = JtJ;
    M.diagonal() += lambda * JtJ.diagonal().cwiseMax(1e-300);
    const Eigen::Vector2d step = M.ldlt().solve(-g);
    const double cn = c + step(0), sn = s + step(1);
    bool improved = false;
    if (std::isfinite(cn) && std::isfinite(sn) && sn > lo && sn < hi && cn > 0.0) {
      const Defect dn = tangency_defect(geo, cn, sn);
      const double Fn = dn.e.squaredNorm();
      if (Fn < F) {
        const bool stalled = std::abs(step(1)) <= 1e-16 * std::abs(s) &&
                             std::abs(step(0)) <= 1e-16 * std::abs(c);
        c = cn;
        s = sn;
        d = dn;
        F = Fn;
        lambda = std::max(lambda * 0.1, 1e-12);
        improved = true;
        if (stalled) break;
      }
    }
    if (!improved) {
      lambda *= 10.0;
      if (lambda > 1e16) break;
    }
  }
  return {c, s, F};
}

}  // namespace

MultiplicityCase classify_case(const GrowthModel& model, double S_in, double D, double alpha) {
  const BufferGeometry geo(model, S_in, D, alpha);
  return case_from(lambda_interval(model, D), S_in, geo.underline_s());
}

std::vector<double> tangency_abscissas(const BufferedConfig& cfg) {
  const BufferGeometry geo(cfg);
  const double S_in = cfg.S_in, D = cfg.D, ul_s = geo.underline_s();
  auto den = [&](double s) { return ul_s - S_in + (S_in - s) * eval_mu(cfg.model, s) / D; };
  auto slope = [&](double s) {
    try {
      return geo.gamma_prime(s);
    } catch (const Error&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };

  std::vector<double> out;
  const double step = S_in / double(kGammaGrid + 1);
  double a = step, da = slope(a), ea = den(a);
  for (std::size_t k = 2; k <= kGammaGrid; ++k) {
    const double b = step * double(k);
    const double db = slope(b), eb = den(b);
    const bool pole_inside = (ea > 0.0) != (eb > 0.0) && !geo.removable_singularity();
    if (!pole_inside && std::isfinite(da) && std::isfinite(db) && (da > 0.0) != (db > 0.0)) {
      const double c = numeric::bisect<double>(slope, a, b);
      if (std::abs(geo.gamma(c) - cfg.r) <= 1e-9) out.push_back(c);
    }
    a = b;
    da = db;
    ea = eb;
  }
  return out;
}

MultiplicityReport r_bar(const GrowthModel& model, double S_in, double D, double alpha) {
  const BufferGeometry geo(model, S_in, D, alpha);
  const auto lam = lambda_interval(model, D);
  const double ul_s = geo.underline_s();

  MultiplicityReport rep{};
  rep.kind = case_from(lam, S_in, ul_s);

  if (rep.kind == MultiplicityCase::CaseI) {
    std::optional<RRange> ra;
    if (!lam || lam->lower >= S_in) {
      ra = extrema_range(geo, std::max(ul_s, 0.0), S_in);
    } else if (ul_s > lam->lower) {
      ra = extrema_range(geo, lam->lower, std::min(ul_s, S_in));
    }
    rep.r_alpha_interval = ra;
    rep.r_bar = 1.0;
    rep.r_safe = 1.0;
    if (ra) {
      rep.r_safe = std::clamp(ra->first, 0.0, 1.0);
      if (ra->second >= 1.0) {
        rep.r_bar = rep.r_safe;
        rep.uniqueness_set_empty = ra->first <= 0.0;
      }
    }
    return rep;
  }

  const double lo = lam->lower, up = *lam->upper;
  double r_plus = 0.0;
  std::optional<RRange> rm;
  switch (rep.kind) {
    case MultiplicityCase::CaseII_sub1:
      r_plus = min_gamma(geo, up, S_in);
      if (ul_s > lo) rm = extrema_range(geo, lo, ul_s);
      break;
    case MultiplicityCase::CaseII_sub3:
      r_plus = min_gamma(geo, lo, up);
      rm = extrema_range(geo, ul_s, S_in);
      break;
    default:
      r_plus = min_gamma(geo, lo, S_in);
      break;
  }
  rep.r_plus_min = r_plus;
  rep.r_minus_interval = rm;
  rep.r_bar = r_plus;
  rep.r_safe = r_plus;
  if (rm) {
    rep.r_safe = std::min(rm->first, r_plus);
    if (rm->second >= r_plus) rep.r_bar = rep.r_safe;
  }
  return rep;
}

double r_bar_crosscheck(const GrowthModel& model, double S_in, double D, double alpha) {
  const BufferGeometry geo(model, S_in, D, alpha);
  const auto lam = lambda_interval(model, D);
  const auto kind = case_from(lam, S_in, geo.underline_s());
  if (kind == MultiplicityCase::CaseI) {
    throw Error(ErrorKind::NoTangency, "no tangency: configuration is not in Case II");
  }
  // admissible abscissas: (s - lambda+)(lambda+ - ul-S) >= 0 inside (lambda-, S_in)
  double lo = lam->lower, hi = S_in;
  if (kind == MultiplicityCase::CaseII_sub1) lo = *lam->upper;
  if (kind == MultiplicityCase::CaseII_sub3) hi = *lam->upper;

  std::optional<Candidate> best;
  constexpr int kStarts = 64;
  for (int k = 0; k < kStarts; ++k) {
    const double s0 = lo + (hi - lo) * (k + 0.5) / kStarts;
    // least-squares c for fixed s as the starting value
    const double g = S_in - s0, A = geo.deficit();
    const double u = 1.0 - A / g, v = A / (g * g);
    const double m = eval_mu(model, s0) / D, mp = eval_mu_prime(model, s0) / D;
    double c0 = (u * (m - 1.0) - v * mp) / (u * u + v * v);
    if (!(c0 > 0.0)) c0 = 1.0;
    const Candidate cand = levenberg_marquardt(geo, c0, s0, lo, hi);
    if (cand.F > 1e-12) continue;
    const double r = 1.0 / (1.0 + cand.c);
    if (!best || r < 1.0 / (1.0 + best->c)) best = cand;
  }
  if (!best) {
    throw Error(ErrorKind::NoTangency, "no tangency: defect minimum above 1e-12");
  }
  return 1.0 / (1.0 + best->c);
}

std::optional<double> locate_ul_alpha(const GrowthModel& model, double S_in, double D) {
  const auto lam = lambda_interval(model, D);
  if (!is_case_two(lam, S_in)) return std::nullopt;
  const double target = *lam->upper;
  const double alpha_max = eval_mu(model, S_in) / D;
  auto gap = [&](double alpha) {
    return BufferGeometry(model, S_in, D, alpha).underline_s() - target;
  };
  constexpr int kScan = 1024;
  double a = alpha_max / kScan;
  double ga = gap(a);
  for (int k = 2; k <= kScan; ++k) {
    const double b = k == kScan ? alpha_max * (1.0 - 1e-9) : alpha_max * k / kScan;
    const double gb = gap(b);
    if ((ga > 0.0) != (gb > 0.0)) return numeric::bisect<double>(gap, a, b);
    a = b;
    ga = gb;
  }
  return std::nullopt;
}

DomainCurve stable_domain_curve(const GrowthModel& model, double S_in, double D,
                                const std::vector<double>& alpha_grid) {
  if (alpha_grid.empty()) throw Error(ErrorKind::Validation, "alpha grid is empty");
  const double alpha_max = eval_mu(model, S_in) / D;
  for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
    const double a = alpha_grid[i];
    if (!(a > 0.0) || a > alpha_max * (1.0 + 1e-12)) {
      throw Error(ErrorKind::Validation, "alpha grid must lie in (0, mu(S_in)/D]");
    }
    if (i > 0 && !(a > alpha_grid[i - 1])) {
      throw Error(ErrorKind::Validation, "alpha grid must be strictly increasing");
    }
  }

  DomainCurve curve;
  curve.points.resize(alpha_grid.size());
  parallel_for(alpha_grid.size(), [&](std::size_t i) {
    curve.points[i] = {alpha_grid[i], r_bar(model, S_in, D, alpha_grid[i]).r_bar};
  });

  curve.ul_alpha = locate_ul_alpha(model, S_in, D);
  if (curve.ul_alpha) {
    const double ua = *curve.ul_alpha;
    curve.jump = std::make_pair(r_bar(model, S_in, D, ua - 1e-4).r_bar,
                                r_bar(model, S_in, D, std::min(ua + 1e-4, alpha_max)).r_bar);
  }
  return curve;
}

}  // namespace bufchem
