#pragma once

// Scalar root finding, bracketed minimisation and closed-form polynomial
// roots. Everything here is templated on the scalar so the same code runs in
// double for production paths and long double for oracles.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

namespace bufchem::numeric {

/// Bisection on a sign-changing bracket. Runs until the bracket collapses to
/// adjacent floating point numbers, `max_iter` is hit, or |f| <= ftol.
template <typename Scalar, typename F>
Scalar bisect(F&& f, Scalar lo, Scalar hi, int max_iter = 200, Scalar ftol = Scalar(0)) {
  Scalar flo = f(lo);
  if (flo == Scalar(0)) return lo;
  Scalar fhi = f(hi);
  if (fhi == Scalar(0)) return hi;
  for (int it = 0; it < max_iter; ++it) {
    const Scalar mid = lo + (hi - lo) / Scalar(2);
    if (!(mid > lo && mid < hi)) break;
    const Scalar fmid = f(mid);
    if (fmid == Scalar(0) || std::abs(fmid) <= ftol) return mid;
    if ((fmid > Scalar(0)) == (flo > Scalar(0))) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return std::abs(flo) <= std::abs(f(hi)) ? lo : hi;
}

template <typename Scalar>
struct MinimumPoint {
  Scalar x;
  Scalar value;
};

/// Golden-section search for a minimum of f on [lo, hi].
template <typename Scalar, typename F>
MinimumPoint<Scalar> golden_section_minimize(F&& f, Scalar lo, Scalar hi, Scalar xtol) {
  const Scalar inv_phi = (std::sqrt(Scalar(5)) - Scalar(1)) / Scalar(2);
  Scalar a = lo, b = hi;
  Scalar c = b - inv_phi * (b - a);
  Scalar d = a + inv_phi * (b - a);
  Scalar fc = f(c), fd = f(d);
  for (int it = 0; it < 400 && (b - a) > xtol; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  MinimumPoint<Scalar> best{c, fc};
  if (fd < best.value) best = {d, fd};
  return best;
}

/// Global minimum of f over the open interval (lo, hi): a uniform grid of
/// `grid` interior points brackets the best cell, golden-section refines it.
template <typename Scalar, typename F>
MinimumPoint<Scalar> grid_minimize(F&& f, Scalar lo, Scalar hi, std::size_t grid, Scalar xtol) {
  const Scalar step = (hi - lo) / Scalar(grid + 1);
  std::size_t best = 1;
  Scalar best_value = std::numeric_limits<Scalar>::infinity();
  for (std::size_t k = 1; k <= grid; ++k) {
    const Scalar v = f(lo + step * Scalar(k));
    if (v < best_value) {
      best_value = v;
      best = k;
    }
  }
  const Scalar a = lo + step * Scalar(best - 1);
  const Scalar b = lo + step * Scalar(best + 1);
  auto refined = golden_section_minimize<Scalar>(f, a, b, xtol);
  if (refined.value > best_value) refined = {lo + step * Scalar(best), best_value};
  return refined;
}

template <typename Scalar>
struct Extremum {
  Scalar x;
  Scalar value;
  bool is_minimum;
};

/// Interior local extrema of f on (lo, hi), located on a uniform grid and
/// refined by golden-section. Endpoints are never reported.
template <typename Scalar, typename F>
std::vector<Extremum<Scalar>> local_extrema(F&& f, Scalar lo, Scalar hi, std::size_t grid,
                                            Scalar xtol) {
  std::vector<Extremum<Scalar>> out;
  if (!(hi > lo) || grid < 3) return out;
  const Scalar step = (hi - lo) / Scalar(grid + 1);
  std::vector<Scalar> v(grid);
  for (std::size_t k = 0; k < grid; ++k) v[k] = f(lo + step * Scalar(k + 1));
  for (std::size_t k = 1; k + 1 < grid; ++k) {
    const bool is_min = v[k] < v[k - 1] && v[k] <= v[k + 1];
    const bool is_max = v[k] > v[k - 1] && v[k] >= v[k + 1];
    if (!is_min && !is_max) continue;
    const Scalar a = lo + step * Scalar(k);
    const Scalar b = lo + step * Scalar(k + 2);
    if (is_min) {
      auto m = golden_section_minimize<Scalar>(f, a, b, xtol);
      out.push_back({m.x, m.value, true});
    } else {
      auto m = golden_section_minimize<Scalar>([&](Scalar x) { return -f(x); }, a, b, xtol);
      out.push_back({m.x, -m.value, false});
    }
  }
  return out;
}

/// Real roots of a x^2 + b x + c (a != 0), ascending, numerically stable form.
template <typename Scalar>
std::vector<Scalar> solve_quadratic(Scalar a, Scalar b, Scalar c) {
  std::vector<Scalar> roots;
  const Scalar disc = b * b - Scalar(4) * a * c;
  if (disc < Scalar(0)) return roots;
  const Scalar sq = std::sqrt(disc);
  const Scalar q = b >= Scalar(0) ? -(b + sq) / Scalar(2) : -(b - sq) / Scalar(2);
  if (q == Scalar(0)) {
    roots = {Scalar(0), Scalar(0)};
  } else {
    roots = {q / a, c / q};
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

template <typename Scalar>
struct CubicRoots {
  std::vector<Scalar> real;                            // ascending
  std::optional<std::complex<Scalar>> complex_pair;    // root with Im > 0
};

/// Roots of c3 x^3 + c2 x^2 + c1 x + c0 (c3 != 0). One real root is taken from
/// the closed form, Newton-polished, and deflated; the remaining quadratic is
/// solved in stable form and its real roots polished on the original cubic.
template <typename Scalar>
CubicRoots<Scalar> solve_cubic(Scalar c3, Scalar c2, Scalar c1, Scalar c0) {
  const Scalar a = c2 / c3, b = c1 / c3, c = c0 / c3;
  auto p = [&](Scalar x) { return ((x + a) * x + b) * x + c; };
  auto dp = [&](Scalar x) { return (Scalar(3) * x + Scalar(2) * a) * x + b; };
  auto polish = [&](Scalar x) {
    for (int it = 0; it < 8; ++it) {
      const Scalar d = dp(x);
      if (d == Scalar(0)) break;
      const Scalar nx = x - p(x) / d;
      if (!std::isfinite(nx) || std::abs(p(nx)) >= std::abs(p(x))) break;
      x = nx;
    }
    return x;
  };

  const Scalar Q = (a * a - Scalar(3) * b) / Scalar(9);
  const Scalar R = (Scalar(2) * a * a * a - Scalar(9) * a * b + Scalar(27) * c) / Scalar(54);
  Scalar x1;
  if (R * R < Q * Q * Q) {
    const Scalar theta = std::acos(std::clamp(R / std::sqrt(Q * Q * Q), Scalar(-1), Scalar(1)));
    const Scalar m = Scalar(-2) * std::sqrt(Q);
    const Scalar two_pi = Scalar(2) * std::acos(Scalar(-1));
    Scalar cand[3] = {m * std::cos(theta / Scalar(3)) - a / Scalar(3),
                      m * std::cos((theta + two_pi) / Scalar(3)) - a / Scalar(3),
                      m * std::cos((theta - two_pi) / Scalar(3)) - a / Scalar(3)};
    x1 = *std::max_element(std::begin(cand), std::end(cand),
                           [](Scalar u, Scalar v) { return std::abs(u) < std::abs(v); });
  } else {
    const Scalar A = -std::copysign(std::cbrt(std::abs(R) + std::sqrt(R * R - Q * Q * Q)), R);
    const Scalar B = A == Scalar(0) ? Scalar(0) : Q / A;
    x1 = (A + B) - a / Scalar(3);
  }
  x1 = polish(x1);

  // x^3 + a x^2 + b x + c = (x - x1)(x^2 + pp x + qq)
  const Scalar pp = a + x1;
  const Scalar qq = std::abs(x1) > Scalar(1) && x1 != Scalar(0) ? -c / x1 : b + pp * x1;

  CubicRoots<Scalar> out;
  out.real.push_back(x1);
  const Scalar disc = pp * pp - Scalar(4) * qq;
  if (disc < Scalar(0)) {
    out.complex_pair = std::complex<Scalar>(-pp / Scalar(2), std::sqrt(-disc) / Scalar(2));
  } else {
    for (Scalar x : solve_quadratic<Scalar>(Scalar(1), pp, qq)) out.real.push_back(polish(x));
  }
  std::sort(out.real.begin(), out.real.end());
  return out;
}

/// All four complex roots of x^4 + a x^3 + b x^2 + c x + d via Ferrari's
/// resolvent cubic, each polished by complex Newton iterations.
template <typename Scalar>
std::vector<std::complex<Scalar>> solve_quartic_monic(Scalar a, Scalar b, Scalar c, Scalar d) {
  using C = std::complex<Scalar>;
  // depressed quartic y^4 + p y^2 + q y + r with x = y - a/4
  const Scalar a2 = a * a;
  const Scalar p = b - Scalar(3) * a2 / Scalar(8);
  const Scalar q = c - a * b / Scalar(2) + a2 * a / Scalar(8);
  const Scalar r = d - a * c / Scalar(4) + a2 * b / Scalar(16) - Scalar(3) * a2 * a2 / Scalar(256);
  const Scalar shift = -a / Scalar(4);

  std::vector<C> ys;
  const Scalar scale = std::max({Scalar(1), std::abs(p), std::sqrt(std::abs(r))});
  if (std::abs(q) <= std::numeric_limits<Scalar>::epsilon() * scale * std::sqrt(scale)) {
    // biquadratic: z^2 + p z + r = 0, z = y^2
    const C disc = std::sqrt(C(p * p - Scalar(4) * r));
    for (C z : {(-p + disc) / Scalar(2), (-p - disc) / Scalar(2)}) {
      const C y = std::sqrt(z);
      ys.push_back(y);
      ys.push_back(-y);
    }
  } else {
    // 8 m^3 + 8 p m^2 + (2 p^2 - 8 r) m - q^2 = 0 has a positive real root
    auto res = solve_cubic<Scalar>(Scalar(8), Scalar(8) * p, Scalar(2) * p * p - Scalar(8) * r,
                                   -q * q);
    Scalar m = res.real.back();
    if (!(m > Scalar(0))) m = std::numeric_limits<Scalar>::min();
    const Scalar s = std::sqrt(Scalar(2) * m);
    // y^2 + p/2 + m = +-(s y - q/(2 s))
    for (Scalar sign : {Scalar(1), Scalar(-1)}) {
      const Scalar bb = -sign * s;
      const Scalar cc = p / Scalar(2) + m + sign * q / (Scalar(2) * s);
      const C disc = std::sqrt(C(bb * bb - Scalar(4) * cc));
      ys.push_back((-bb + disc) / Scalar(2));
      ys.push_back((-bb - disc) / Scalar(2));
    }
  }

  auto poly = [&](C x) { return (((x + a) * x + b) * x + c) * x + d; };
  auto dpoly = [&](C x) { return ((Scalar(4) * x + Scalar(3) * a) * x + Scalar(2) * b) * x + c; };
  std::vector<C> roots;
  for (const C& y : ys) {
    C x = y + shift;
    for (int it = 0; it < 8; ++it) {
      const C dx = dpoly(x);
      if (std::abs(dx) == Scalar(0)) break;
      const C nx = x - poly(x) / dx;
      if (!(std::abs(poly(nx)) < std::abs(poly(x)))) break;
      x = nx;
    }
    roots.push_back(x);
  }
  return roots;
}

}  // namespace bufchem::numeric
