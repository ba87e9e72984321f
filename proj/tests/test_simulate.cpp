#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "bufchem/error.hpp"
#include "bufchem/simulate.hpp"
#include "random_configs.hpp"

using namespace bufchem;

namespace {

const GrowthModel table1 = GrowthModel::haldane(12.0, 1.0, 0.08);

BufferedConfig make(const GrowthModel& m, double S_in, double D, double alpha, double r) {
  return BufferedConfig{m, S_in, D, alpha, r, std::nullopt};
}

}  // namespace

TEST_CASE("integrator order on a linear problem") {
  // x' = -x, exact e^{-t}
  IntegratorSettings st;
  st.t_end = 5.0;
  for (double tol : {1e-6, 1e-9}) {
    st.rel_tol = tol;
    st.abs_tol = tol * 1e-2;
    const auto traj = integrate_dopri<1>([](const StateVec<1>& x) { return StateVec<1>(-x); },
                                         StateVec<1>(1.0), st);
    CHECK(traj.times.back() == 5.0);
    CHECK(std::abs(traj.states.back()(0) - std::exp(-5.0)) < 50 * tol * std::exp(-5.0) + 1e-12);
  }
}

TEST_CASE("settings validation") {
  IntegratorSettings st;
  st.rel_tol = 0.0;
  CHECK_THROWS_AS(validate(st), Error);
  st = {};
  st.t_end = -1;
  CHECK_THROWS_AS(validate(st), Error);
  CHECK_THROWS_AS(integrate(SingleParams{table1, 1.4, 1.0}, Eigen::Vector2d(-1, 1), {}), Error);
}

TEST_CASE("fixed point stays put") {
  const BufferedConfig cfg = make(table1, 1.4, 1.0, 0.6, 0.5);
  const auto eqs = find_equilibria(cfg);
  IntegratorSettings st;
  st.t_end = 50.0;
  const auto traj = integrate(cfg, eqs.front().state, st);
  // drift stays within a few local error budgets
  const double budget = st.abs_tol + st.rel_tol * eqs.front().state.cwiseAbs().maxCoeff();
  for (const auto& x : traj.states) {
    CHECK((x - eqs.front().state).cwiseAbs().maxCoeff() <= 10 * budget);
  }
  CHECK(detect_convergence(traj, eqs, 1e-6) == std::optional<std::size_t>(0));
  CHECK_FALSE(detect_convergence(traj, std::vector<EquilibriumB>{eqs.back()}, 1e-15));
}

TEST_CASE("buffer mass balance decays at rate alpha D") {
  std::mt19937_64 rng(79);
  IntegratorSettings st;
  for (int k = 0; k < 20; ++k) {
    const auto cfg = testing::random_a2_config(rng);
    st.t_end = 20.0 / cfg.D;
    const Eigen::Vector4d x0(testing::uniform(rng, 0, 3), testing::uniform(rng, 0, 3),
                             testing::uniform(rng, 0, 3), testing::uniform(rng, 0, 3));
    const auto traj = integrate(cfg, x0, st);
    const double z0 = std::abs(x0(2) + x0(3) - cfg.S_in);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      const auto& x = traj.states[i];
      const double z = std::abs(x(2) + x(3) - cfg.S_in);
      CHECK(z <= z0 * std::exp(-cfg.alpha * cfg.D * traj.times[i]) * (1 + 1e-6) + 1e-9);
    }
  }
}

TEST_CASE("single chemostat Case 3 converges to E-") {
  const SingleParams p{GrowthModel::monod(2, 1), 3.0, 1.0};
  IntegratorSettings st;
  st.t_end = 100.0 / p.D;
  const auto traj = integrate(p, Eigen::Vector2d(3.0, 1e-3), st);
  CHECK((traj.states.back() - Eigen::Vector2d(1.0, 2.0)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("a seeded buffer never washes out") {
  const BufferedConfig cfg = make(table1, 1.4, 1.0, 0.5, 0.5);
  REQUIRE(cfg.alpha * cfg.D <= eval_mu(table1, 1.4));
  IntegratorSettings st;
  st.t_end = 200.0 / (cfg.alpha * cfg.D);
  const auto traj = integrate(cfg, Eigen::Vector4d(1.4, 0.0, 1.4, 1e-6), st);
  const double s2 = lambda_interval(table1, 0.5)->lower;
  const auto& x = traj.states.back();
  CHECK(std::abs(x(2) - s2) < 1e-6);
  CHECK(std::abs(x(3) - (1.4 - s2)) < 1e-6);
  // the main tank is invaded from the buffer
  CHECK(x(1) > 1e-3);
}

TEST_CASE("property: non-negativity on 1000 random runs") {
  std::mt19937_64 rng(83);
  IntegratorSettings st;
  int min_violations = 0;
  for (int k = 0; k < 1000; ++k) {
    const auto cfg = testing::random_a2_config(rng, {.monod = k % 3 == 0});
    st.t_end = 20.0 / cfg.D;
    Eigen::Vector4d x0;
    for (int j = 0; j < 4; ++j) {
      x0(j) = (j % 2 == 1 && k % 2 == 0) ? 1e-9 : testing::uniform(rng, 0, 2 * cfg.S_in);
    }
    const auto traj = integrate(cfg, x0, st);
    for (const auto& x : traj.states) {
      if (x.minCoeff() < -std::min(10 * st.abs_tol, 1e-12)) ++min_violations;
    }
  }
  CHECK(min_violations == 0);
}

TEST_CASE("property: halving tolerances moves the end state by < 10x the tighter tolerance") {
  std::mt19937_64 rng(89);
  for (int k = 0; k < 20; ++k) {
    const auto cfg = testing::random_a2_config(rng);
    IntegratorSettings a;
    a.t_end = 5.0 / cfg.D;
    IntegratorSettings b = a;
    b.rel_tol *= 0.5;
    b.abs_tol *= 0.5;
    const Eigen::Vector4d x0(0.5 * cfg.S_in, 0.3, 0.2 * cfg.S_in, 0.4);
    const auto ta = integrate(cfg, x0, a);
    const auto tb = integrate(cfg, x0, b);
    const double scale = std::max(1.0, tb.states.back().cwiseAbs().maxCoeff());
    CHECK((ta.states.back() - tb.states.back()).cwiseAbs().maxCoeff() <=
          10 * b.rel_tol * scale * 100);
  }
}

TEST_CASE("basin probe of the bistable single chemostat") {
  const SingleParams p{table1, 1.4, 1.0};
  const auto cands = basin_candidates(classify_portrait(p));
  REQUIRE(cands.size() == 3);
  std::vector<Eigen::Vector2d> grid;
  for (int i = 1; i <= 6; ++i)
    for (int j = 1; j <= 6; ++j) grid.emplace_back(1.4 * i / 6, 1.4 * j / 6);
  IntegratorSettings st;
  st.t_end = 200.0;
  const auto labels = basin_probe(p, grid, st, cands);
  const auto n_pos = std::count(labels.begin(), labels.end(), std::optional<std::size_t>(0));
  const auto n_wash = std::count(labels.begin(), labels.end(), std::optional<std::size_t>(2));
  CHECK(n_pos > 0);
  CHECK(n_wash > 0);
}

TEST_CASE("csv layout") {
  const SingleParams p{GrowthModel::monod(2, 1), 3.0, 1.0};
  IntegratorSettings st;
  st.t_end = 1.0;
  const auto traj = integrate(p, Eigen::Vector2d(1.0, 0.5), st);
  std::ostringstream os;
  write_csv(os, traj, 2.0);
  const std::string text = os.str();
  CHECK(text.rfind("t,S,X\n", 0) == 0);
  CHECK(text.find('\r') == std::string::npos);
  // second row carries 2 * X0
  std::istringstream is(text);
  std::string header, row;
  std::getline(is, header);
  std::getline(is, row);
  CHECK(row == "0,1,1");
}
