#include "bufchem/buffered_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bufchem/error.hpp"
#include "bufchem/numeric.hpp"
#include "bufchem/stability.hpp"

namespace bufchem {

namespace {

constexpr std::size_t kScanCells = 4096;
constexpr int kRefine = 8;
constexpr double kRefineBelow = 1e-4;
constexpr double kTangentBelow = 1e-8;
constexpr double kCrossCheckTol = 1e-7;

struct ScanRoot {
  double s;
  bool tangent;
};

bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

std::vector<ScanRoot> scan_roots(const BufferGeometry& geo, double r) {
  const double S_in = geo.S_in();
  auto h = [&](double s) { return geo.residual(r, s); };
  auto dh = [&](double s) { return geo.residual_prime(r, s); };

  std::vector<double> pts;
  pts.reserve(kScanCells * 2);
  const double step = S_in / double(kScanCells);
  std::vector<double> coarse(kScanCells + 1);
  for (std::size_t k = 0; k <= kScanCells; ++k) coarse[k] = h(step * double(k));
  auto small = [&](std::size_t k) {
    // |f_r| < 1e-4 in terms of the pole-free residual; the last node is the pole
    if (k == kScanCells) return false;
    const double s = step * double(k);
    return std::abs(coarse[k]) * geo.D() < kRefineBelow * r * (S_in - s);
  };
  for (std::size_t k = 0; k < kScanCells; ++k) {
    pts.push_back(step * double(k));
    if (small(k) || small(k + 1)) {
      for (int j = 1; j < kRefine; ++j) pts.push_back(step * (double(k) + double(j) / kRefine));
    }
  }
  pts.push_back(S_in);

  std::vector<ScanRoot> roots;
  double ha = h(pts[0]), da = dh(pts[0]);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i], b = pts[i + 1];
    const double hb = h(b), db = dh(b);
    if (ha == 0.0 && a > 0.0) {
      roots.push_back({a, false});
    } else if ((ha > 0.0 && hb < 0.0) || (ha < 0.0 && hb > 0.0)) {
      roots.push_back({numeric::bisect<double>(h, a, b), false});
    } else if ((da > 0.0 && db < 0.0) || (da < 0.0 && db > 0.0)) {
      const double c = numeric::bisect<double>(dh, a, b);
      const double hc = h(c);
      if ((hc > 0.0) != (ha > 0.0) && hc != 0.0) {
        roots.push_back({numeric::bisect<double>(h, a, c), false});
        roots.push_back({numeric::bisect<double>(h, c, b), false});
      } else if (std::abs(geo.f(r, c)) < kTangentBelow) {
        roots.push_back({c, true});
      }
    }
    ha = hb;
    da = db;
  }

  std::sort(roots.begin(), roots.end(),
            [](const ScanRoot& x, const ScanRoot& y) { return x.s < y.s; });
  std::vector<ScanRoot> out;
  for (const auto& x : roots) {
    if (!out.empty() && x.s - out.back().s <= 1e-9 * S_in) continue;
    out.push_back(x);
  }
  return out;
}

struct CubicRoot {
  double s;
  bool from_pair;
};

std::vector<CubicRoot> cubic_roots(const BufferGeometry& geo, double r) {
  const Haldane* hal = geo.model().as_haldane();
  if (!hal) throw Error(ErrorKind::Unsupported, "equilibrium cubic needs a Haldane model");
  const double D = geo.D(), S_in = geo.S_in();
  const double c0 = S_in - (1.0 - r) * geo.deficit();
  const double rmu = r * hal->mu_bar;
  const auto res = numeric::solve_cubic<double>(-D / hal->K_I, D * (c0 / hal->K_I - 1.0) + rmu,
                                                D * (c0 - hal->K) - rmu * S_in, D * hal->K * c0);
  std::vector<CubicRoot> out;
  for (double x : res.real) {
    if (x > 0.0 && x < S_in) out.push_back({x, false});
  }
  if (res.complex_pair && std::abs(res.complex_pair->imag()) <= 1e-7 * std::max(1.0, S_in)) {
    const double x = res.complex_pair->real();
    if (x > 0.0 && x < S_in) out.push_back({x, true});
  }
  std::sort(out.begin(), out.end(),
            [](const CubicRoot& x, const CubicRoot& y) { return x.s < y.s; });
  std::vector<CubicRoot> dedup;
  for (const auto& x : out) {
    if (!dedup.empty() && x.s - dedup.back().s <= 1e-9 * S_in) continue;
    dedup.push_back(x);
  }
  return dedup;
}

template <typename T, typename Get>
bool isolated(const std::vector<T>& xs, std::size_t i, double gap, Get get) {
  if (i > 0 && get(xs[i]) - get(xs[i - 1]) < gap) return false;
  if (i + 1 < xs.size() && get(xs[i + 1]) - get(xs[i]) < gap) return false;
  return true;
}

template <typename T, typename Get>
double nearest(const std::vector<T>& xs, double x, Get get) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& y : xs) best = std::min(best, std::abs(get(y) - x));
  return best;
}

void tag_positive(const BufferedConfig& cfg, EquilibriumB& eq) {
  const auto rep = eigenvalues_positive_eq(cfg, eq);
  eq.eigenvalues = rep.values;
  eq.tag = rep.tag;
}

}  // namespace

void validate(const BufferedConfig& cfg) {
  if (!(cfg.S_in > 0.0)) throw Error(ErrorKind::Validation, "S_in must be > 0");
  if (!(cfg.D > 0.0)) throw Error(ErrorKind::Validation, "D must be > 0");
  if (!(cfg.r > 0.0 && cfg.r < 1.0)) throw Error(ErrorKind::Validation, "r must lie in (0, 1)");
  if (!(cfg.alpha > 0.0)) throw Error(ErrorKind::Validation, "alpha must be > 0");
  if (cfg.alpha * (1.0 - cfg.r) > 1.0 + 1e-12) {
    throw Error(ErrorKind::Validation, "alpha (1 - r) must be <= 1 (Q1 >= 0)");
  }
  if (cfg.physical) {
    const auto& p = *cfg.physical;
    const double Q = p.Q1 + p.Q2, V = p.V1 + p.V2;
    const double r = p.V1 / V;
    const double alpha = p.Q2 / ((1.0 - r) * Q);
    if (!rel_close(r, cfg.r, 1e-12) || !rel_close(alpha, cfg.alpha, 1e-12) ||
        !rel_close(Q / V, cfg.D, 1e-12)) {
      throw Error(ErrorKind::Validation, "physical split does not match (D, alpha, r)");
    }
  }
}

BufferedConfig from_physical(double Q1, double Q2, double V1, double V2, double S_in,
                             const GrowthModel& model) {
  if (V1 == 0.0) throw Error(ErrorKind::Unsupported, "V1 = 0 is the by-pass limit");
  if (V2 == 0.0) throw Error(ErrorKind::Unsupported, "V2 = 0 is a single chemostat");
  if (!(V1 > 0.0) || !(V2 > 0.0)) throw Error(ErrorKind::Validation, "volumes must be > 0");
  if (!(Q1 >= 0.0)) throw Error(ErrorKind::Validation, "Q1 must be >= 0");
  if (!(Q2 > 0.0)) throw Error(ErrorKind::Validation, "Q2 must be > 0");
  const double Q = Q1 + Q2, V = V1 + V2;
  const double r = V1 / V;
  BufferedConfig cfg{model, S_in, Q / V, Q2 / ((1.0 - r) * Q), r, PhysicalSplit{Q1, Q2, V1, V2}};
  validate(cfg);
  return cfg;
}

void require_a2(const GrowthModel& model, double S_in, double D, double alpha) {
  const auto lam = lambda_interval(model, alpha * D);
  if (!lam) {
    throw Error(ErrorKind::AssumptionViolated,
                "A2 fails: Lambda(alpha D) is empty (mu never exceeds alpha D)");
  }
  if (!(lam->lower < S_in)) {
    throw Error(ErrorKind::AssumptionViolated, "A2 fails: lambda-(alpha D) >= S_in");
  }
}

BufferGeometry::BufferGeometry(const GrowthModel& model, double S_in, double D, double alpha,
                               BufferRoot root)
    : model_(model), S_in_(S_in), D_(D), alpha_(alpha) {
  if (!(S_in > 0.0) || !(D > 0.0) || !(alpha > 0.0)) {
    throw Error(ErrorKind::Validation, "S_in, D and alpha must be > 0");
  }
  require_a2(model, S_in, D, alpha);
  const auto lam = *lambda_interval(model, alpha * D);
  if (root == BufferRoot::Lower) {
    s2_ = lam.lower;
  } else {
    if (!lam.upper || !(*lam.upper < S_in)) {
      throw Error(ErrorKind::Domain, "lambda+(alpha D) is not below S_in");
    }
    s2_ = *lam.upper;
  }
  deficit_ = alpha * (S_in - s2_);
  ul_s_ = S_in - deficit_;
  if (ul_s_ > 0.0 && ul_s_ < S_in) {
    removable_ = std::abs(eval_mu(model, ul_s_) - D) <= 1e-9 * D;
    if (const auto main = lambda_interval(model, D)) {
      // same tolerance as the sub-case split on ul-S vs lambda+
      removable_ = removable_ || std::abs(ul_s_ - main->lower) <= 1e-9 ||
                   (main->upper && std::abs(ul_s_ - *main->upper) <= 1e-9);
    }
    if (removable_) {
      gamma_at_ul_s_ = 1.0 / (1.0 - (S_in - ul_s_) * eval_mu_prime(model, ul_s_) / D);
    }
  }
}

BufferGeometry::BufferGeometry(const BufferedConfig& cfg, BufferRoot root)
    : BufferGeometry(cfg.model, cfg.S_in, cfg.D, cfg.alpha, root) {
  validate(cfg);
}

void BufferGeometry::require_in_domain(double s) const {
  if (!(s >= 0.0 && s < S_in_)) throw Error(ErrorKind::Domain, "s must lie in [0, S_in)");
}

double BufferGeometry::phi(double r, double s) const {
  require_in_domain(s);
  return 1.0 + (1.0 - r) / r * (1.0 - deficit_ / (S_in_ - s));
}

double BufferGeometry::phi_prime(double r, double s) const {
  require_in_domain(s);
  const double gap = S_in_ - s;
  return -(1.0 - r) / r * deficit_ / (gap * gap);
}

double BufferGeometry::f(double r, double s) const { return D_ * phi(r, s) - eval_mu(model_, s); }

double BufferGeometry::f_prime(double r, double s) const {
  return D_ * phi_prime(r, s) - eval_mu_prime(model_, s);
}

double BufferGeometry::residual(double r, double s) const {
  const double gap = S_in_ - s;
  return gap - (1.0 - r) * deficit_ - r * gap * eval_mu(model_, s) / D_;
}

double BufferGeometry::residual_prime(double r, double s) const {
  return -1.0 + r * eval_mu(model_, s) / D_ - r * (S_in_ - s) * eval_mu_prime(model_, s) / D_;
}

double BufferGeometry::gamma(double s) const {
  if (!(s > 0.0 && s < S_in_)) throw Error(ErrorKind::Domain, "gamma needs s in (0, S_in)");
  if (removable_ && std::abs(s - ul_s_) <= 1e-7 * S_in_) return gamma_at_ul_s_;
  const double num = ul_s_ - s;
  const double den = ul_s_ - S_in_ + (S_in_ - s) * eval_mu(model_, s) / D_;
  if (std::abs(den) <= 1e-14) {
    if (std::abs(num) <= 1e-14 && removable_) return gamma_at_ul_s_;
    throw Error(ErrorKind::Singular, "gamma has a pole at s = " + std::to_string(s));
  }
  return num / den;
}

double BufferGeometry::gamma_prime(double s) const {
  if (!(s > 0.0 && s < S_in_)) throw Error(ErrorKind::Domain, "gamma needs s in (0, S_in)");
  if (removable_ && std::abs(s - ul_s_) <= 1e-7 * S_in_) {
    const double h = 1e-4 * S_in_;
    return (gamma(s + h) - gamma(s - h)) / (2.0 * h);
  }
  const double mu = eval_mu(model_, s);
  const double num = ul_s_ - s;
  const double den = ul_s_ - S_in_ + (S_in_ - s) * mu / D_;
  const double den_prime = (-mu + (S_in_ - s) * eval_mu_prime(model_, s)) / D_;
  if (std::abs(den) <= 1e-14) throw Error(ErrorKind::Singular, "gamma' at a pole");
  return (-den - num * den_prime) / (den * den);
}

double s2_star(const BufferedConfig& cfg) { return BufferGeometry(cfg).s2_star(); }

double underline_s(const BufferedConfig& cfg) { return BufferGeometry(cfg).underline_s(); }

double phi_eval(const BufferedConfig& cfg, double s) { return BufferGeometry(cfg).phi(cfg.r, s); }

double f_r(const BufferedConfig& cfg, double s) { return BufferGeometry(cfg).f(cfg.r, s); }

double gamma_eval(const BufferedConfig& cfg, double s) { return BufferGeometry(cfg).gamma(s); }

std::vector<double> positive_roots_scan(const BufferGeometry& geo, double r) {
  std::vector<double> out;
  for (const auto& x : scan_roots(geo, r)) out.push_back(x.s);
  return out;
}

std::vector<double> positive_roots_cubic(const BufferGeometry& geo, double r) {
  std::vector<double> out;
  for (const auto& x : cubic_roots(geo, r)) out.push_back(x.s);
  return out;
}

std::vector<double> positive_roots(const BufferGeometry& geo, double r) {
  if (!geo.model().as_haldane()) return positive_roots_scan(geo, r);

  const auto cubic = cubic_roots(geo, r);
  const auto scan = scan_roots(geo, r);
  // near-double roots are resolved differently by the two routes; only
  // well-separated simple roots are required to agree
  const double gap = 1e-4 * geo.S_in();
  auto cs = [](const CubicRoot& x) { return x.s; };
  auto ss = [](const ScanRoot& x) { return x.s; };
  for (std::size_t i = 0; i < cubic.size(); ++i) {
    if (cubic[i].from_pair || !isolated(cubic, i, gap, cs)) continue;
    if (nearest(scan, cubic[i].s, ss) > kCrossCheckTol) {
      throw Error(ErrorKind::Consistency,
                  "cubic root " + std::to_string(cubic[i].s) + " missing from scan");
    }
  }
  for (std::size_t i = 0; i < scan.size(); ++i) {
    if (scan[i].tangent || !isolated(scan, i, gap, ss)) continue;
    if (nearest(cubic, scan[i].s, cs) > kCrossCheckTol) {
      throw Error(ErrorKind::Consistency,
                  "scan root " + std::to_string(scan[i].s) + " missing from cubic");
    }
  }
  std::vector<double> out;
  for (const auto& x : cubic) out.push_back(x.s);
  return out;
}

IntervalSet gamma_region(const BufferedConfig& cfg) {
  const BufferGeometry geo(cfg);
  std::vector<double> cuts{0.0};
  for (double s : positive_roots(geo, cfg.r)) cuts.push_back(s);
  cuts.push_back(cfg.S_in);
  std::vector<OpenInterval> pieces;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    if (geo.residual(cfg.r, mid) < 0.0) pieces.push_back({cuts[i], cuts[i + 1]});
  }
  return IntervalSet(std::move(pieces));
}

std::vector<EquilibriumB> find_equilibria(const BufferedConfig& cfg) {
  validate(cfg);
  const double S_in = cfg.S_in;
  std::vector<EquilibriumB> out;

  auto add_positive = [&](BufferRoot which, Branch branch) {
    const BufferGeometry geo(cfg, which);
    const double s2 = geo.s2_star();
    for (double s1 : positive_roots(geo, cfg.r)) {
      EquilibriumB eq{Eigen::Vector4d(s1, S_in - s1, s2, S_in - s2), branch};
      tag_positive(cfg, eq);
      out.push_back(eq);
    }
  };
  add_positive(BufferRoot::Lower, Branch::BufferPositive);

  const auto buf = *lambda_interval(cfg.model, cfg.alpha * cfg.D);
  if (buf.upper && *buf.upper < S_in) add_positive(BufferRoot::Upper, Branch::BufferSaddle);

  std::vector<double> main_levels;
  if (const auto lam = lambda_interval(cfg.model, cfg.D / cfg.r)) {
    if (lam->lower < S_in) main_levels.push_back(lam->lower);
    if (lam->upper && *lam->upper < S_in) main_levels.push_back(*lam->upper);
  }
  main_levels.push_back(S_in);
  for (double s1 : main_levels) {
    EquilibriumB eq{Eigen::Vector4d(s1, S_in - s1, S_in, 0.0), Branch::BufferWashout};
    const auto rep = eigenvalues_washout_branch(cfg, s1);
    eq.eigenvalues = rep.values;
    eq.tag = rep.tag;
    out.push_back(eq);
  }
  return out;
}

}  // namespace bufchem
