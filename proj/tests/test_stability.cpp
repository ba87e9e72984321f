#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "bufchem/buffered_core.hpp"
#include "bufchem/simulate.hpp"
#include "bufchem/stability.hpp"
#include "random_configs.hpp"

using namespace bufchem;

namespace {

const GrowthModel table1 = GrowthModel::haldane(12.0, 1.0, 0.08);

BufferedConfig make(const GrowthModel& m, double S_in, double D, double alpha, double r) {
  return BufferedConfig{m, S_in, D, alpha, r, std::nullopt};
}

Eigen::Vector4d sorted_real_eigs(const Eigen::Matrix4d& J) {
  Eigen::EigenSolver<Eigen::Matrix4d> es(J, false);
  Eigen::Vector4d v = es.eigenvalues().real();
  std::sort(v.data(), v.data() + 4);
  return v;
}

// forward-difference Jacobian of the vector field
Eigen::Matrix4d fd_jacobian(const BufferedConfig& cfg, const Eigen::Vector4d& x) {
  Eigen::Matrix4d J;
  for (int j = 0; j < 4; ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(x(j)));
    Eigen::Vector4d xp = x, xm = x;
    xp(j) += h;
    xm(j) = std::max(0.0, xm(j) - h);
    J.col(j) = (rhs(cfg, xp) - rhs(cfg, xm)) / (xp(j) - xm(j));
  }
  return J;
}

}  // namespace

TEST_CASE("spectrum classification") {
  CHECK(classify_spectrum(Eigen::Vector4d(-3, -2, -1, -0.5), 1e-9).kind ==
        StabilityKind::Stable);
  const auto sad = classify_spectrum(Eigen::Vector4d(-3, -2, 1, 0.5), 1e-9);
  CHECK(sad.kind == StabilityKind::Saddle);
  CHECK(sad.unstable_dim == 2);
  CHECK(classify_spectrum(Eigen::Vector4d(-3, -2, 1, 1e-12), 1e-9).kind ==
        StabilityKind::NonHyperbolic);
}

TEST_CASE("analytic Jacobian matches finite differences") {
  std::mt19937_64 rng(53);
  for (int k = 0; k < 50; ++k) {
    const auto cfg = testing::random_a2_config(rng);
    const Eigen::Vector4d x(testing::uniform(rng, 0.1, 2.0), testing::uniform(rng, 0.1, 2.0),
                            testing::uniform(rng, 0.1, 2.0), testing::uniform(rng, 0.1, 2.0));
    const Eigen::Matrix4d diff = jacobian(cfg, x) - fd_jacobian(cfg, x);
    CHECK(diff.cwiseAbs().maxCoeff() < 1e-5 * std::max(1.0, jacobian(cfg, x).norm()));
  }
}

TEST_CASE("Monod positive equilibrium is stable") {
  const BufferedConfig cfg = make(GrowthModel::monod(2, 1), 3.0, 1.0, 0.8, 0.6);
  const auto eqs = find_equilibria(cfg);
  const auto rep = eigenvalues_positive_eq(cfg, eqs.front());
  CHECK(rep.source == EigenSource::ClosedForm);
  CHECK(rep.tag.kind == StabilityKind::Stable);
  CHECK((rep.values.array() < 0.0).all());
}

TEST_CASE("buffer eigenvalue is negative on the lower buffer root") {
  const BufferedConfig cfg = make(table1, 1.4, 1.0, 0.6, 0.5);
  const auto eqs = find_equilibria(cfg);
  const double s2 = eqs.front().S2();
  const double want = -eval_mu_prime(table1, s2) * (1.4 - s2);
  CHECK(want < 0.0);
  const auto& v = eqs.front().eigenvalues;
  CHECK(std::any_of(v.data(), v.data() + 4, [&](double x) { return std::abs(x - want) < 1e-12; }));
}

TEST_CASE("washout branch examples") {
  // mu(S_in) < min(D/r, alpha D): full washout attracting
  const BufferedConfig w = make(table1, 5.0, 1.0, 1.0, 0.5);
  REQUIRE(eval_mu(table1, 5.0) < std::min(2.0, 1.0));
  CHECK(eigenvalues_washout_branch(w, 5.0).tag.kind == StabilityKind::Stable);

  // S1* = lambda+(D/r) < S_in is a saddle
  const BufferedConfig c = make(table1, 1.4, 0.6, 0.5, 0.6);
  const auto lam = lambda_interval(table1, 1.0);
  REQUIRE(*lam->upper < 1.4);
  const auto rep = eigenvalues_washout_branch(c, *lam->upper);
  CHECK(rep.tag.kind == StabilityKind::Saddle);

  // alpha D <= mu(S_in): mu(S_in) - alpha D >= 0, not attracting
  const BufferedConfig l2 = make(table1, 1.4, 1.0, 0.5, 0.5);
  const auto full = eigenvalues_washout_branch(l2, 1.4);
  CHECK(full.tag.kind != StabilityKind::Stable);
  const double lead = eval_mu(table1, 1.4) - 0.5;
  CHECK(std::any_of(full.values.data(), full.values.data() + 4,
                    [&](double x) { return std::abs(x - lead) < 1e-12; }));
}

TEST_CASE("property: closed forms against two numeric oracles") {
  std::mt19937_64 rng(59);
  int compared = 0;
  for (int k = 0; k < 200; ++k) {
    const auto cfg = testing::random_a2_config(rng, {.monod = k % 5 == 0});
    for (const auto& eq : find_equilibria(cfg)) {
      const Eigen::Vector4d eig_lib = sorted_real_eigs(jacobian(cfg, eq.state));
      CHECK((eq.eigenvalues - eig_lib).cwiseAbs().maxCoeff() <=
            1e-8 * std::max(1.0, eig_lib.cwiseAbs().maxCoeff()));
      const auto oracle = numeric_eig_oracle(cfg, eq);
      if (oracle.ill_conditioned) continue;
      ++compared;
      CHECK((oracle.values - eq.eigenvalues).cwiseAbs().maxCoeff() <= 1e-9);
      if (eq.branch == Branch::BufferWashout) continue;
      // similarity invariance between coordinate systems
      const Eigen::Vector4d zs = sorted_real_eigs(jacobian_zs(cfg, eq));
      CHECK((zs - eig_lib).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, zs.norm()));
    }
  }
  CHECK(compared > 400);
}

TEST_CASE("Faddeev-LeVerrier on a known matrix") {
  Eigen::Matrix4d A = Eigen::Matrix4d::Zero();
  A.diagonal() << 1, 2, 3, 4;
  // (x-1)(x-2)(x-3)(x-4) = x^4 - 10 x^3 + 35 x^2 - 50 x + 24
  const auto c = characteristic_polynomial<double>(A);
  CHECK(c[3] == doctest::Approx(-10));
  CHECK(c[2] == doctest::Approx(35));
  CHECK(c[1] == doctest::Approx(-50));
  CHECK(c[0] == doctest::Approx(24));
}

TEST_CASE("property: stable tags are locally attracting") {
  std::mt19937_64 rng(61);
  IntegratorSettings st;
  int tested = 0;
  for (int k = 0; k < 30; ++k) {
    const auto cfg = testing::random_a2_config(rng);
    st.t_end = 50.0 / cfg.D;
    for (const auto& eq : find_equilibria(cfg)) {
      if (eq.tag.kind != StabilityKind::Stable) continue;
      const double slow = eq.eigenvalues.cwiseAbs().minCoeff();
      if (slow * st.t_end < 30.0) continue;  // decay too slow to settle by 50/D
      ++tested;
      for (int j = 0; j < 10; ++j) {
        Eigen::Vector4d d;
        for (int i = 0; i < 4; ++i) d(i) = testing::uniform(rng, -1, 1);
        d *= 1e-4 / d.norm();
        const Eigen::Vector4d x0 = (eq.state + d).cwiseMax(0.0);
        const auto traj = integrate(cfg, x0, st);
        CHECK((traj.states.back() - eq.state).cwiseAbs().maxCoeff() < 1e-6);
      }
    }
  }
  CHECK(tested > 10);
}
