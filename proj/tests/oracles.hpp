#pragma once

// Independent reference computations for the tests: adaptive quadrature,
// brute-force grids, and small closed forms derived by hand.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "morreymax/operators.hpp"
#include "morreymax/profiles.hpp"

namespace oracle {

inline double rel_err(double got, double want) {
  if (got == want) return 0.0;
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

/// ∫_lo^hi fn(r) r^{n-1} w(r) dr, segment by segment as c·∫ r^{n-1-β} w(r) dr
/// with tanh-sinh, so the singularity at 0 sits in a single power.
inline double quad_over_pieces(const morreymax::PiecewisePowerFn& fn, double lo, double hi, int n,
                               const std::function<double(double)>& weight) {
  boost::math::quadrature::tanh_sinh<double> ts;
  double total = 0.0;
  for (std::size_t i = 0; i < fn.segment_count(); ++i) {
    const double a = std::max(lo, fn.segment_begin(i));
    const double b = std::min(hi, fn.segment_end(i));
    if (!(b > a)) continue;
    const auto& p = fn.segment_piece(i);
    if (p.coeff == 0.0) continue;
    const double expo = n - 1 - p.beta;
    total += p.coeff * ts.integrate(
                           [&](double r) { return r > 0.0 ? std::pow(r, expo) * weight(r) : 0.0; },
                           a, b);
  }
  return total;
}

inline double moment(const morreymax::PiecewisePowerFn& fn, double x, int n) {
  return quad_over_pieces(fn, 0.0, x, n, [](double) { return 1.0; });
}

inline double log_moment(const morreymax::PiecewisePowerFn& fn, double x, int n) {
  return quad_over_pieces(fn, 0.0, x, n, [&](double r) { return std::log(x / r); });
}

/// ∫_0^x Hf(t) t^{n-1} dt by tanh-sinh over the pieces a·t^{-n} + b·t^{-β}.
inline double quad_hardy_moment(const morreymax::HardyTransform& h, double x) {
  boost::math::quadrature::tanh_sinh<double> ts;
  const int n = h.dimension();
  double total = 0.0;
  for (const auto& p : h.pieces()) {
    const double a = p.lo;
    const double b = std::min(p.hi, x);
    if (!(b > a)) continue;
    total += ts.integrate(
        [&](double t) {
          if (!(t > 0.0)) return 0.0;
          return p.a / t + (p.b == 0.0 ? 0.0 : p.b * std::pow(t, n - 1 - p.beta));
        },
        a, b);
  }
  return total;
}

/// Composite trapezoid for a step profile with `nodes` points shared among
/// the segments of [0, x] in proportion to their length, breakpoints always
/// being nodes.
inline double trapezoid_moment(const morreymax::PiecewisePowerFn& fn, double x, int n,
                               std::size_t nodes) {
  std::vector<double> cuts{0.0};
  for (double b : fn.breakpoints()) {
    if (b > 0.0 && b < x) cuts.push_back(b);
  }
  cuts.push_back(x);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    const double c = fn(0.5 * (a + b));
    if (c == 0.0) continue;
    const auto m = std::max<std::size_t>(1, static_cast<std::size_t>(nodes * (b - a) / x));
    const double h = (b - a) / static_cast<double>(m);
    auto g = [&](double r) { return c * std::pow(r, n - 1); };
    double s = 0.5 * (g(a) + g(b));
    for (std::size_t k = 1; k < m; ++k) s += g(a + h * static_cast<double>(k));
    total += s * h;
  }
  return total;
}

/// Random step function on ℝ whose breakpoints sit on multiples of 1/100 in
/// [-5, 5]; about one piece in five is zero.
inline morreymax::PiecewisePowerFn lattice_step_function(std::uint64_t seed, int steps) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> cell(-500, 500);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<int> ticks;
  for (int i = 0; i <= steps; ++i) ticks.push_back(cell(rng));
  std::sort(ticks.begin(), ticks.end());
  ticks.erase(std::unique(ticks.begin(), ticks.end()), ticks.end());
  if (ticks.size() < 2) ticks.push_back(ticks.front() + 1);
  std::vector<double> bps;
  for (int t : ticks) bps.push_back(t / 100.0);
  std::vector<morreymax::PowerPiece> pieces(bps.size() - 1);
  for (auto& p : pieces) p.coeff = u01(rng) < 0.2 ? 0.0 : 0.1 + 2.9 * u01(rng);
  return morreymax::PiecewisePowerFn(std::move(bps), std::move(pieces)).canonical();
}

/// Brute-force maximal function on the lattice h·ℤ ∩ [lo, hi]: the best
/// average over all lattice intervals [a, b] with a <= x <= b, where x is the
/// lattice point xi·h. F(k) = ∫_{lo}^{k h} f is accumulated cell by cell
/// from exact overlaps (f is constant on each cell when its breakpoints lie
/// on the lattice). For each a the best b is the upper tangent from (a, F(a))
/// to the upper hull of {(b, F(b)) : b >= x}.
class GridMaximal {
public:
  GridMaximal(const morreymax::PiecewisePowerFn& f, long lo, long hi, double h)
      : lo_(lo), hi_(hi), h_(h), F_(static_cast<std::size_t>(hi - lo + 1), 0.0) {
    for (long k = lo; k < hi; ++k) {
      const double mid = (static_cast<double>(k) + 0.5) * h;
      F_[idx(k + 1)] = F_[idx(k)] + f(mid) * h;
    }
  }

  double operator()(long xi) const {
    std::vector<long> hull;
    for (long k = hi_; k >= xi; --k) {
      // Built right to left; the hull stays upper with decreasing slopes as
      // seen from the left.
      while (hull.size() >= 2) {
        const long q = hull[hull.size() - 1];
        const long r = hull[hull.size() - 2];
        if (cross(k, q, r) <= 0.0) hull.pop_back();
        else break;
      }
      hull.push_back(k);
    }
    std::reverse(hull.begin(), hull.end());
    double best = 0.0;
    for (long a = lo_; a <= xi; ++a) {
      std::size_t lo = (hull.front() == a) ? 1 : 0;
      if (lo >= hull.size()) continue;
      std::size_t hi = hull.size() - 1;
      while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (slope(a, hull[mid + 1]) > slope(a, hull[mid])) lo = mid + 1;
        else hi = mid;
      }
      best = std::max(best, slope(a, hull[lo]));
    }
    return best;
  }

private:
  std::size_t idx(long k) const { return static_cast<std::size_t>(k - lo_); }
  double slope(long a, long b) const {
    return (F_[idx(b)] - F_[idx(a)]) / (static_cast<double>(b - a) * h_);
  }
  // > 0 when q lies above the segment k..r.
  double cross(long k, long q, long r) const {
    const double x1 = static_cast<double>(q - k), y1 = F_[idx(q)] - F_[idx(k)];
    const double x2 = static_cast<double>(r - k), y2 = F_[idx(r)] - F_[idx(k)];
    return x2 * y1 - x1 * y2;
  }

  long lo_, hi_;
  double h_;
  std::vector<double> F_;
};

}  // namespace oracle
