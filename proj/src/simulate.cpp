#include "bufchem/simulate.hpp"

#include <cstdio>

#include "bufchem/parallel.hpp"

namespace bufchem {

namespace {

template <int N, typename F>
std::optional<std::size_t> probe_one(F&& f, const StateVec<N>& x0,
                                     const IntegratorSettings& settings,
                                     const std::vector<BasinCandidate<N>>& candidates,
                                     const std::vector<StateVec<N>>& states, double eps) {
  // once near an attracting candidate, run on to t_hit / 0.9 so the final 10%
  // of the record lies after the hit
  double t_stop = std::numeric_limits<double>::infinity();
  const StopPredicate<N> stop = [&](double t, const StateVec<N>& x) {
    if (t >= t_stop) return true;
    if (std::isfinite(t_stop)) return false;
    for (const auto& c : candidates) {
      if (c.attracting && (x - c.state).cwiseAbs().maxCoeff() < 0.5 * eps) {
        t_stop = t / 0.9;
        break;
      }
    }
    return false;
  };
  try {
    auto traj = integrate_dopri<N>(f, x0, settings, stop);
    auto hit = detect_convergence<N>(traj, states, eps);
    if (!hit && std::isfinite(t_stop) && traj.times.back() < settings.t_end) {
      traj = integrate_dopri<N>(f, x0, settings);
      hit = detect_convergence<N>(traj, states, eps);
    }
    return hit;
  } catch (const StiffnessError&) {
    return std::nullopt;
  }
}

template <int N, typename F>
AttractorMap probe_all(F f, const std::vector<StateVec<N>>& grid,
                       const IntegratorSettings& settings,
                       const std::vector<BasinCandidate<N>>& candidates, double eps) {
  if (grid.empty()) throw Error(ErrorKind::Validation, "basin grid is empty");
  if (candidates.empty()) throw Error(ErrorKind::Validation, "no candidate equilibria");
  std::vector<StateVec<N>> states;
  for (const auto& c : candidates) states.push_back(c.state);
  AttractorMap labels(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    labels[i] = probe_one<N>(f, grid[i], settings, candidates, states, eps);
  });
  return labels;
}

void put(std::ostream& os, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

}  // namespace

void validate(const IntegratorSettings& s) {
  auto tol_ok = [](double v) { return v > 0.0 && v <= 1e-2; };
  if (!tol_ok(s.rel_tol)) throw Error(ErrorKind::Validation, "rel_tol must lie in (0, 1e-2]");
  if (!tol_ok(s.abs_tol)) throw Error(ErrorKind::Validation, "abs_tol must lie in (0, 1e-2]");
  if (!(s.max_step > 0.0)) throw Error(ErrorKind::Validation, "max_step must be > 0");
  if (!(s.t_end > 0.0) || !std::isfinite(s.t_end)) {
    throw Error(ErrorKind::Validation, "t_end must be finite and > 0");
  }
}

Eigen::Vector2d rhs(const SingleParams& p, const Eigen::Vector2d& x) {
  const double growth = eval_mu(p.model, std::max(x(0), 0.0)) * x(1);
  return {-growth + p.D * (p.S_in - x(0)), growth - p.D * x(1)};
}

Eigen::Vector4d rhs(const BufferedConfig& c, const Eigen::Vector4d& x) {
  const double share = c.alpha * (1.0 - c.r);  // fraction of the feed routed via the buffer
  const double g1 = eval_mu(c.model, std::max(x(0), 0.0)) * x(1);
  const double g2 = eval_mu(c.model, std::max(x(2), 0.0)) * x(3);
  const double main_rate = c.D / c.r;
  return {-g1 + main_rate * (share * (x(2) - x(0)) + (1.0 - share) * (c.S_in - x(0))),
          g1 + main_rate * (share * (x(3) - x(1)) - (1.0 - share) * x(1)),
          -g2 + c.D * c.alpha * (c.S_in - x(2)),
          g2 - c.D * c.alpha * x(3)};
}

SingleTrajectory integrate(const SingleParams& params, const Eigen::Vector2d& x0,
                           const IntegratorSettings& settings, const StopPredicate<2>& stop) {
  validate(params);
  return integrate_dopri<2>([&](const Eigen::Vector2d& x) { return rhs(params, x); }, x0,
                            settings, stop);
}

BufferedTrajectory integrate(const BufferedConfig& cfg, const Eigen::Vector4d& x0,
                             const IntegratorSettings& settings, const StopPredicate<4>& stop) {
  validate(cfg);
  return integrate_dopri<4>([&](const Eigen::Vector4d& x) { return rhs(cfg, x); }, x0,
                            settings, stop);
}

std::optional<std::size_t> detect_convergence(const BufferedTrajectory& traj,
                                              const std::vector<EquilibriumB>& candidates,
                                              double eps) {
  std::vector<Eigen::Vector4d> states;
  for (const auto& eq : candidates) states.push_back(eq.state);
  return detect_convergence<4>(traj, states, eps);
}

AttractorMap basin_probe(const SingleParams& params, const std::vector<Eigen::Vector2d>& grid,
                         const IntegratorSettings& settings,
                         const std::vector<BasinCandidate<2>>& candidates, double eps) {
  validate(params);
  return probe_all<2>([&](const Eigen::Vector2d& x) { return rhs(params, x); }, grid, settings,
                      candidates, eps);
}

AttractorMap basin_probe(const BufferedConfig& cfg, const std::vector<Eigen::Vector4d>& grid,
                         const IntegratorSettings& settings,
                         const std::vector<BasinCandidate<4>>& candidates, double eps) {
  validate(cfg);
  return probe_all<4>([&](const Eigen::Vector4d& x) { return rhs(cfg, x); }, grid, settings,
                      candidates, eps);
}

std::vector<BasinCandidate<2>> basin_candidates(const Portrait& portrait) {
  std::vector<BasinCandidate<2>> out;
  for (const auto& eq : portrait.equilibria) {
    const bool attracting =
        eq.tag == SingleTag::WashoutAttracting || eq.tag == SingleTag::PositiveAttracting;
    out.push_back({Eigen::Vector2d(eq.S, eq.X), attracting});
  }
  return out;
}

std::vector<BasinCandidate<4>> basin_candidates(const std::vector<EquilibriumB>& equilibria) {
  std::vector<BasinCandidate<4>> out;
  for (const auto& eq : equilibria) {
    out.push_back({eq.state, eq.tag.kind == StabilityKind::Stable});
  }
  return out;
}

void write_csv(std::ostream& os, const SingleTrajectory& traj, double biomass_scale) {
  os << "t,S,X\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    put(os, traj.times[i]);
    os << ',';
    put(os, traj.states[i](0));
    os << ',';
    put(os, traj.states[i](1) * biomass_scale);
    os << '\n';
  }
}

void write_csv(std::ostream& os, const BufferedTrajectory& traj, double biomass_scale) {
  os << "t,S1,X1,S2,X2\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const auto& x = traj.states[i];
    put(os, traj.times[i]);
    for (int k = 0; k < 4; ++k) {
      os << ',';
      put(os, k % 2 == 1 ? x(k) * biomass_scale : x(k));
    }
    os << '\n';
  }
}

}  // namespace bufchem
