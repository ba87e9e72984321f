#pragma once

// Trajectories of the single and buffered chemostat with an embedded
// Dormand-Prince 5(4) pair, plus convergence detection and basin probing.

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bufchem/buffered_core.hpp"
#include "bufchem/error.hpp"
#include "bufchem/single_chemostat.hpp"

namespace bufchem {

struct IntegratorSettings {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double max_step = std::numeric_limits<double>::infinity();
  double t_end = 100.0;
};

/// Tolerances in (0, 1e-2], positive max_step and t_end.
void validate(const IntegratorSettings& settings);

template <int N>
using StateVec = Eigen::Matrix<double, N, 1>;

template <int N>
struct Trajectory {
  std::vector<double> times;
  std::vector<StateVec<N>> states;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
};

using SingleTrajectory = Trajectory<2>;
using BufferedTrajectory = Trajectory<4>;

/// Step-size underflow; carries the last accepted state.
class StiffnessError : public Error {
 public:
  StiffnessError(double t, Eigen::VectorXd last_state)
      : Error(ErrorKind::Stiffness, "step size underflow at t = " + std::to_string(t)),
        t_(t),
        last_state_(std::move(last_state)) {}

  double time() const noexcept { return t_; }
  const Eigen::VectorXd& last_state() const noexcept { return last_state_; }

 private:
  double t_;
  Eigen::VectorXd last_state_;
};

Eigen::Vector2d rhs(const SingleParams& params, const Eigen::Vector2d& x);
Eigen::Vector4d rhs(const BufferedConfig& cfg, const Eigen::Vector4d& x);

template <int N>
using StopPredicate = std::function<bool(double, const StateVec<N>&)>;

/// Adaptive Dormand-Prince 5(4) from t = 0 to settings.t_end, or until `stop`
/// returns true after an accepted step. Steps that push a component below
/// -min(10 abs_tol, 1e-12) are retried at half the step size.
template <int N, typename F>
Trajectory<N> integrate_dopri(F&& f, const StateVec<N>& x0, const IntegratorSettings& settings,
                              const StopPredicate<N>& stop = {}) {
  using V = StateVec<N>;
  // Butcher tableau; the system is autonomous so the nodes c_i are not needed
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  validate(settings);
  if ((x0.array() < 0.0).any()) throw Error(ErrorKind::Domain, "initial state must be >= 0");

  const double t_end = settings.t_end;
  const double floor_neg = -std::min(10.0 * settings.abs_tol, 1e-12);
  const double h_min = 1e-14 * t_end;

  Trajectory<N> traj;
  traj.times.push_back(0.0);
  traj.states.push_back(x0);

  auto scale_of = [&](const V& a, const V& b) {
    return (settings.abs_tol + settings.rel_tol * a.cwiseAbs().cwiseMax(b.cwiseAbs()).array())
        .matrix();
  };

  double t = 0.0;
  V x = x0;
  V k1 = f(x);

  // initial step (Hairer, Norsett, Wanner II.4)
  double h;
  {
    const V sc = scale_of(x, x);
    const double d0 = (x.array() / sc.array()).matrix().norm() / std::sqrt(double(N));
    const double d1 = (k1.array() / sc.array()).matrix().norm() / std::sqrt(double(N));
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, t_end);
    const V x1 = x + h0 * k1;
    const V k = f(x1);
    const double d2 = ((k - k1).array() / sc.array()).matrix().norm() / std::sqrt(double(N)) / h0;
    const double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                                : std::pow(0.01 / std::max(d1, d2), 1.0 / 5.0);
    h = std::min({100.0 * h0, h1, settings.max_step, t_end});
  }

  while (t < t_end) {
    if (t + h > t_end) h = t_end - t;
    if (h < h_min && t + h < t_end) throw StiffnessError(t, x);

    const V k2 = f(x + h * (a21 * k1));
    const V k3 = f(x + h * (a31 * k1 + a32 * k2));
    const V k4 = f(x + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const V k5 = f(x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const V k6 = f(x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const V xn = x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const V k7 = f(xn);
    const V err_vec = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double err =
        (err_vec.array() / scale_of(x, xn).array()).matrix().norm() / std::sqrt(double(N));

    if (!std::isfinite(err)) {
      ++traj.rejected_steps;
      h *= 0.5;
      continue;
    }
    if ((xn.array() < floor_neg).any()) {
      ++traj.rejected_steps;
      h *= 0.5;
      continue;
    }
    if (err > 1.0) {
      ++traj.rejected_steps;
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      continue;
    }

    t = (t_end - (t + h) <= 1e-15 * t_end) ? t_end : t + h;
    x = xn;
    k1 = k7;
    ++traj.accepted_steps;
    traj.times.push_back(t);
    traj.states.push_back(x);
    if (stop && stop(t, x)) break;

    const double grow = err == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(err, -0.2));
    h = std::min(h * grow, settings.max_step);
  }
  return traj;
}

SingleTrajectory integrate(const SingleParams& params, const Eigen::Vector2d& x0,
                           const IntegratorSettings& settings,
                           const StopPredicate<2>& stop = {});
BufferedTrajectory integrate(const BufferedConfig& cfg, const Eigen::Vector4d& x0,
                             const IntegratorSettings& settings,
                             const StopPredicate<4>& stop = {});

/// Index of the candidate the trajectory settles on: final state within eps
/// (sup norm) and the last 10% of the time span within 2 eps.
template <int N>
std::optional<std::size_t> detect_convergence(const Trajectory<N>& traj,
                                              const std::vector<StateVec<N>>& candidates,
                                              double eps) {
  if (!(eps > 0.0)) throw Error(ErrorKind::Domain, "eps must be > 0");
  if (traj.states.empty()) return std::nullopt;
  const double t0 = traj.times.front(), t1 = traj.times.back();
  const double tail_start = t1 - 0.1 * (t1 - t0);
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if ((traj.states.back() - candidates[c]).cwiseAbs().maxCoeff() > eps) continue;
    bool stays = true;
    for (std::size_t i = traj.times.size(); i-- > 0 && traj.times[i] >= tail_start;) {
      if ((traj.states[i] - candidates[c]).cwiseAbs().maxCoeff() > 2.0 * eps) {
        stays = false;
        break;
      }
    }
    if (stays) return c;
  }
  return std::nullopt;
}

std::optional<std::size_t> detect_convergence(const BufferedTrajectory& traj,
                                              const std::vector<EquilibriumB>& candidates,
                                              double eps);

template <int N>
struct BasinCandidate {
  StateVec<N> state;
  bool attracting;  // early exit is only taken near attracting candidates
};

/// Label per initial state: candidate index, or nullopt (unresolved).
using AttractorMap = std::vector<std::optional<std::size_t>>;

AttractorMap basin_probe(const SingleParams& params, const std::vector<Eigen::Vector2d>& grid,
                         const IntegratorSettings& settings,
                         const std::vector<BasinCandidate<2>>& candidates, double eps = 1e-6);
AttractorMap basin_probe(const BufferedConfig& cfg, const std::vector<Eigen::Vector4d>& grid,
                         const IntegratorSettings& settings,
                         const std::vector<BasinCandidate<4>>& candidates, double eps = 1e-6);

std::vector<BasinCandidate<2>> basin_candidates(const Portrait& portrait);
std::vector<BasinCandidate<4>> basin_candidates(const std::vector<EquilibriumB>& equilibria);

/// CSV with header "t,S,X" (single) or "t,S1,X1,S2,X2" (buffered), 17
/// significant digits. `biomass_scale` multiplies the X columns.
void write_csv(std::ostream& os, const SingleTrajectory& traj, double biomass_scale = 1.0);
void write_csv(std::ostream& os, const BufferedTrajectory& traj, double biomass_scale = 1.0);

}  // namespace bufchem
