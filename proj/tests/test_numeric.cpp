#include <doctest.h>

#include <atomic>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "bufchem/error.hpp"
#include "bufchem/interval_set.hpp"
#include "bufchem/numeric.hpp"
#include "bufchem/parallel.hpp"

using namespace bufchem;

TEST_CASE("bisect finds the root of a bracketed monotone function") {
  const double x = numeric::bisect<double>([](double s) { return s * s - 2.0; }, 0.0, 2.0);
  CHECK(x == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("golden section and grid minimisation") {
  auto f = [](double x) { return (x - 0.3) * (x - 0.3) + 1.0; };
  const auto m = numeric::golden_section_minimize<double>(f, 0.0, 1.0, 1e-12);
  CHECK(m.x == doctest::Approx(0.3).epsilon(1e-8));
  // two wells, the deeper on the right
  auto g = [](double x) { return std::cos(3.0 * x) - 0.1 * x; };
  const auto gm = numeric::grid_minimize<double>(g, 0.0, 6.0, 512, 1e-12);
  CHECK(gm.x > 3.0);
  CHECK(std::abs(-3.0 * std::sin(3.0 * gm.x) - 0.1) < 1e-6);
}

TEST_CASE("local extrema skip the endpoints") {
  auto f = [](double x) { return std::sin(x); };
  const auto ext = numeric::local_extrema<double>(f, 0.0, 7.0, 256, 1e-12);
  REQUIRE(ext.size() == 2);
  CHECK_FALSE(ext[0].is_minimum);
  CHECK(ext[0].x == doctest::Approx(M_PI / 2).epsilon(1e-8));
  CHECK(ext[1].is_minimum);
  CHECK(ext[1].value == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("quadratic and cubic roots from prescribed factors") {
  const auto q = numeric::solve_quadratic<double>(1.0, -1e8, 1.0);
  REQUIRE(q.size() == 2);
  CHECK(q[0] == doctest::Approx(1e-8).epsilon(1e-12));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 200; ++k) {
    const double a = u(rng), b = u(rng), c = u(rng), lead = 0.5 + std::abs(u(rng));
    // lead (x - a)(x - b)(x - c)
    const auto roots = numeric::solve_cubic<double>(lead, -lead * (a + b + c),
                                                    lead * (a * b + b * c + a * c),
                                                    -lead * a * b * c);
    std::vector<double> want{a, b, c};
    std::sort(want.begin(), want.end());
    const double sep = std::min(want[1] - want[0], want[2] - want[1]);
    if (sep < 1e-3) continue;
    REQUIRE(roots.real.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(roots.real[i] - want[i]) < 1e-9);
  }

  // (x - 1)(x^2 + 1)
  const auto cp = numeric::solve_cubic<double>(1.0, -1.0, 1.0, -1.0);
  REQUIRE(cp.real.size() == 1);
  CHECK(cp.real[0] == doctest::Approx(1.0).epsilon(1e-14));
  REQUIRE(cp.complex_pair);
  CHECK(std::abs(cp.complex_pair->imag() - 1.0) < 1e-12);
}

TEST_CASE("quartic roots reproduce prescribed real roots") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<long double> u(-20.0L, 0.0L);
  for (int k = 0; k < 200; ++k) {
    long double r[4] = {u(rng), u(rng), u(rng), u(rng)};
    std::sort(r, r + 4);
    if (r[1] - r[0] < 1e-2L || r[2] - r[1] < 1e-2L || r[3] - r[2] < 1e-2L) continue;
    const long double a = -(r[0] + r[1] + r[2] + r[3]);
    const long double b = r[0] * r[1] + r[0] * r[2] + r[0] * r[3] + r[1] * r[2] + r[1] * r[3] +
                          r[2] * r[3];
    const long double c =
        -(r[0] * r[1] * r[2] + r[0] * r[1] * r[3] + r[0] * r[2] * r[3] + r[1] * r[2] * r[3]);
    const long double d = r[0] * r[1] * r[2] * r[3];
    auto roots = numeric::solve_quartic_monic<long double>(a, b, c, d);
    std::vector<long double> re;
    for (const auto& z : roots) re.push_back(z.real());
    std::sort(re.begin(), re.end());
    for (int i = 0; i < 4; ++i) CHECK(std::abs(double(re[i] - r[i])) < 1e-9);
  }
}

TEST_CASE("interval set merges and sorts") {
  IntervalSet s({{2.0, 3.0}, {0.0, 1.0}, {0.5, 1.5}, {4.0, 4.0}});
  REQUIRE(s.size() == 2);
  CHECK(s.components()[0].lo == 0.0);
  CHECK(s.components()[0].hi == 1.5);
  CHECK(s.contains(2.5));
  CHECK_FALSE(s.contains(2.0));
  CHECK_FALSE(s.contains(1.7));
}

TEST_CASE("parallel_for visits every index once and rethrows") {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(10,
                               [](std::size_t i) {
                                 if (i == 7) throw Error(ErrorKind::Domain, "boom");
                               }),
                  Error);
}
