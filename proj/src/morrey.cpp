#include "morreymax/morrey.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "morreymax/errors.hpp"
#include "morreymax/format.hpp"

namespace morreymax {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxBisection = 400;

struct Best {
  double value = -1.0;
  double x = 0.0;
  void offer(double v, double at) {
    if (v > value) {
      value = v;
      x = at;
    }
  }
};

std::vector<double> log_grid(double lo, double hi, int per_decade) {
  std::vector<double> out;
  const double l0 = std::log10(lo);
  const double l1 = std::log10(hi);
  const auto steps = static_cast<int>(std::ceil((l1 - l0) * per_decade));
  out.reserve(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) out.push_back(std::pow(10.0, l0 + (l1 - l0) * k / steps));
  return out;
}

// Search window for the radial suprema: a decade beyond the outermost
// positive breakpoints, [0.1, 10] for pure power laws.
std::pair<double, double> radial_window(std::span<const double> bps) {
  double lo = kInf;
  double hi = 0.0;
  for (double b : bps) {
    if (b > 0.0) {
      lo = std::min(lo, b);
      hi = std::max(hi, b);
    }
  }
  if (hi == 0.0) return {0.1, 10.0};
  return {lo / 10.0, hi * 10.0};
}

double relative_change(double now, double before) {
  if (now == before) return 0.0;
  return std::abs(now - before) / std::max(std::abs(now), std::abs(before));
}

void check_radial_params(const MorreyParams& params, int n, const char* who) {
  if (params.p != 1.0) throw InvalidInput(std::string(who) + " is defined for p = 1 only");
  if (params.n != n) {
    throw InvalidInput(std::string(who) + ": params.n = " + std::to_string(params.n) +
                       " but profile dimension is " + std::to_string(n));
  }
  if (!(params.lambda > 0.0 && params.lambda < n)) {
    throw InvalidInput(std::string(who) + " needs 0 < lambda < n");
  }
}

NormResult divergent_result(std::string name, double at) {
  NormResult r;
  r.functional = std::move(name);
  r.value = kInf;
  r.argmax = at;
  r.divergent = true;
  return r;
}

// Runs the grid certificate for a radial supremum whose exact candidates
// gave `exact`. `polish` may add refined values near grid maxima.
template <typename Value>
NormResult certify_radial(std::string name, Best exact, Value value_at, std::span<const double> bps,
                          const SupSearchConfig& cfg,
                          const std::function<void(const std::vector<double>&,
                                                   const std::vector<double>&, Best&)>& polish) {
  const auto [lo, hi] = radial_window(bps);
  double previous = 0.0;
  double delta = 0.0;
  Best best = exact;
  for (int level = 0; level <= cfg.refinement_levels; ++level) {
    const auto xs = log_grid(lo, hi, cfg.points_per_decade << level);
    std::vector<double> vs(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) {
      vs[k] = value_at(xs[k]);
      best.offer(vs[k], xs[k]);
    }
    if (polish) polish(xs, vs, best);
    if (level > 0) delta = relative_change(best.value, previous);
    previous = best.value;
  }
  if (delta > cfg.max_refine_delta) {
    throw NonConvergence(name + ": refinement delta " + format_number(delta) + " exceeds " +
                         format_number(cfg.max_refine_delta));
  }
  NormResult r;
  r.functional = std::move(name);
  r.value = std::max(best.value, 0.0);
  r.argmax = best.x;
  r.refine_delta = delta;
  return r;
}

// Root of a monotone-on-[u, v] function g with g(u), g(v) of opposite signs.
template <typename G>
double bisect(G g, double u, double v, double gu, double tol) {
  for (int it = 0; it < kMaxBisection; ++it) {
    const double mid = 0.5 * (u + v);
    if (v - u <= tol * std::max(std::abs(v), 1e-300)) return mid;
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if ((gm > 0.0) == (gu > 0.0)) {
      u = mid;
      gu = gm;
    } else {
      v = mid;
    }
  }
  throw NonConvergence("bisection did not reach tolerance " + format_number(tol));
}

// Per-piece closed form A' with I(x) = A' + (c/e) x^e on [lo, hi).
double moment_offset(double I_lo, const PowerPiece& p, double lo, double e) {
  return lo == 0.0 ? 0.0 : I_lo - p.coeff * std::pow(lo, e) / e;
}

// Critical point of x^{λ-n} I(x) inside a piece (also the turning point of
// (λ-n)J + I), or NaN.
double piece_critical_point(double offset, const PowerPiece& p, double e, double lambda, int n,
                            double lo, double hi) {
  if (p.is_zero() || p.beta == lambda) return std::numeric_limits<double>::quiet_NaN();
  const double rhs = (n - lambda) * offset * e / (p.coeff * (lambda - p.beta));
  if (!(rhs > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  const double xc = std::pow(rhs, 1.0 / e);
  return (xc > lo && xc < hi) ? xc : std::numeric_limits<double>::quiet_NaN();
}

// I(x) = ∫_0^x φ ρ^{n-1} and J(x) = ∫_0^x φ ρ^{n-1} ln(x/ρ) from values stored
// at the breakpoints, using
//
//     J(x) = J(b_k) + I(b_k) ln(x/b_k) + ∫_{b_k}^x φ ρ^{n-1} ln(x/ρ) dρ,
//
// so each evaluation is a binary search plus one piece. Agrees with
// moment_integral / log_moment_integral.
class RadialIntegrals {
public:
  RadialIntegrals(const PiecewisePowerFn& fn, int n) : fn_(fn), n_(n) {
    const std::size_t B = fn.segment_count();
    I_.assign(B, 0.0);
    J_.assign(B, 0.0);
    for (std::size_t k = 0; k + 1 < B; ++k) {
      const double hi = fn.segment_begin(k + 1);
      const auto [di, dj] = partial(k, hi);
      I_[k + 1] = I_[k] + di;
      J_[k + 1] = base_log(k, hi) + dj;
    }
  }

  double I(double x) const {
    const auto k = segment(x);
    if (k < 0) return 0.0;
    return I_[k] + partial(static_cast<std::size_t>(k), x).first;
  }

  double J(double x) const {
    const auto k = segment(x);
    if (k < 0) return 0.0;
    return base_log(static_cast<std::size_t>(k), x) + partial(static_cast<std::size_t>(k), x).second;
  }

private:
  std::ptrdiff_t segment(double x) const {
    const auto bps = fn_.breakpoints();
    auto it = std::upper_bound(bps.begin(), bps.end(), x);
    return (it - bps.begin()) - 1;
  }

  double base_log(std::size_t k, double x) const {
    const double b = fn_.segment_begin(k);
    return b > 0.0 ? J_[k] + I_[k] * std::log(x / b) : J_[k];
  }

  // (∫_{b_k}^x φ ρ^{n-1}, ∫_{b_k}^x φ ρ^{n-1} ln(x/ρ)) on segment k.
  std::pair<double, double> partial(std::size_t k, double x) const {
    const PowerPiece& p = fn_.segment_piece(k);
    const double lo = fn_.segment_begin(k);
    if (p.is_zero() || !(x > lo)) return {0.0, 0.0};
    const double e = n_ - p.beta;
    const double xe = std::pow(x, e);
    if (lo == 0.0) return {p.coeff * xe / e, p.coeff * xe / (e * e)};
    const double le = std::pow(lo, e);
    const double L = std::log(x / lo);
    const double di = p.coeff * (xe - le) / e;
    return {di, p.coeff * ((xe - le) / (e * e) - le * L / e)};
  }

  const PiecewisePowerFn& fn_;
  int n_;
  std::vector<double> I_;
  std::vector<double> J_;
};

}  // namespace

void SupSearchConfig::validate() const {
  if (points_per_decade <= 0) throw InvalidInput("points_per_decade must be positive");
  if (refinement_levels <= 0) throw InvalidInput("refinement_levels must be positive");
  if (!(bisection_tol > 0.0 && bisection_tol <= 1e-4)) {
    throw InvalidInput("bisection_tol must lie in (0, 1e-4]");
  }
  if (!(max_refine_delta > 0.0)) throw InvalidInput("max_refine_delta must be positive");
  if (max_grid_anchors <= 0) throw InvalidInput("max_grid_anchors must be positive");
}

std::string NormResult::argmax_text() const {
  if (!std::isnan(argmax_end)) return format_number(argmax) + ":" + format_number(argmax_end);
  return format_number(argmax);
}

void write_norm_csv(std::ostream& out, std::span<const NormResult> rows) {
  out << "functional,value,argmax,refine_delta\n";
  for (const auto& r : rows) {
    out << r.functional << ',' << format_number(r.value) << ',' << r.argmax_text() << ','
        << format_number(r.refine_delta) << '\n';
  }
}

NormResult morrey_norm_direct_1d(const PiecewisePowerFn& f, const MorreyParams& params,
                                 const SupSearchConfig& cfg) {
  cfg.validate();
  if (params.n != 1) throw InvalidInput("direct 1D norm needs n = 1");
  if (!f.is_piecewise_constant()) throw InvalidInput("direct 1D norm requires beta = 0 on every piece");
  if (!f.has_compact_support()) throw InvalidInput("direct 1D norm requires a zero tail");

  NormResult result;
  result.functional = "direct";
  if (f.is_zero()) {
    result.argmax_end = 0.0;
    return result;
  }

  const double p = params.p;
  const double lambda = params.lambda;
  const PiecewisePowerFn g = p == 1.0 ? f : f.powered(p);
  const auto bps = g.breakpoints();
  const std::size_t B = bps.size();
  std::vector<double> G(B, 0.0);
  for (std::size_t i = 1; i < B; ++i) {
    G[i] = G[i - 1] + g.segment_piece(i - 1).coeff * (bps[i] - bps[i - 1]);
  }
  auto primitive = [&](double x) {
    if (x <= bps.front()) return 0.0;
    if (x >= bps.back()) return G.back();
    auto it = std::upper_bound(bps.begin(), bps.end(), x);
    const auto i = static_cast<std::size_t>(it - bps.begin()) - 1;
    return G[i] + g.segment_piece(i).coeff * (x - bps[i]);
  };
  const double expo = lambda - 1.0;
  auto psi = [&](double len, double mass) { return expo == 0.0 ? mass : std::pow(len, expo) * mass; };

  double best = -1.0;
  double best_a = 0.0;
  double best_b = 0.0;
  auto offer = [&](double a, double b, double mass) {
    const double v = psi(b - a, mass);
    if (v > best || (v == best && b - a > best_b - best_a)) {
      best = v;
      best_a = a;
      best_b = b;
    }
  };

  // (i) breakpoint pairs.
  for (std::size_t i = 0; i + 1 < B; ++i) {
    for (std::size_t k = i + 1; k < B; ++k) offer(bps[i], bps[k], G[k] - G[i]);
  }

  // (ii) stationary lengths of ℓ ↦ ℓ^{λ-1}(α + cℓ): ℓ* = (1-λ)α/(cλ). For
  // α > 0 this is a minimum along the piece, so it never beats (i); it is
  // kept as an explicit check of that claim.
  if (lambda > 0.0 && lambda < 1.0) {
    for (std::size_t i = 0; i < B; ++i) {
      for (std::size_t j = i; j + 1 < B; ++j) {
        const double c = g.segment_piece(j).coeff;
        if (c <= 0.0) continue;
        const double alpha = (G[j] - G[i]) - c * (bps[j] - bps[i]);
        if (!(alpha > 0.0)) continue;
        const double b = bps[i] + (1.0 - lambda) * alpha / (c * lambda);
        if (b > bps[j] && b < bps[j + 1]) offer(bps[i], b, primitive(b) - G[i]);
      }
      for (std::size_t j = 0; j < i; ++j) {
        const double c = g.segment_piece(j).coeff;
        if (c <= 0.0) continue;
        const double alpha = (G[i] - G[j + 1]) - c * (bps[i] - bps[j + 1]);
        if (!(alpha > 0.0)) continue;
        const double a = bps[i] - (1.0 - lambda) * alpha / (c * lambda);
        if (a > bps[j] && a < bps[j + 1]) offer(a, bps[i], G[i] - primitive(a));
      }
    }
  }

  // (iii) grid certificate over anchored lengths.
  std::vector<double> anchors;
  const auto stride = std::max<std::size_t>(1, B / static_cast<std::size_t>(cfg.max_grid_anchors));
  for (std::size_t i = 0; i < B; i += stride) anchors.push_back(bps[i]);
  anchors.push_back(best_a);
  anchors.push_back(best_b);
  double min_gap = kInf;
  for (std::size_t i = 1; i < B; ++i) min_gap = std::min(min_gap, bps[i] - bps[i - 1]);
  const double span_len = bps.back() - bps.front();
  min_gap = std::max(min_gap, span_len * 1e-8);
  const double to_value = 1.0 / p;
  double previous = 0.0;
  double delta = 0.0;
  for (int level = 0; level <= cfg.refinement_levels; ++level) {
    const auto lengths = log_grid(min_gap / 10.0, span_len * 10.0, cfg.points_per_decade << level);
    for (double a : anchors) {
      const double Ga = primitive(a);
      for (double len : lengths) {
        offer(a, a + len, primitive(a + len) - Ga);
        offer(a - len, a, Ga - primitive(a - len));
      }
    }
    const double now = std::pow(std::max(best, 0.0), to_value);
    if (level > 0) delta = relative_change(now, previous);
    previous = now;
  }
  if (delta > cfg.max_refine_delta) {
    throw NonConvergence("direct norm: refinement delta " + format_number(delta) + " exceeds " +
                         format_number(cfg.max_refine_delta));
  }
  result.value = std::pow(std::max(best, 0.0), to_value);
  result.argmax = best_a;
  result.argmax_end = best_b;
  result.refine_delta = delta;
  return result;
}

NormResult reduced_functional(const RadialProfile& profile, const MorreyParams& params,
                              const SupSearchConfig& cfg) {
  cfg.validate();
  const int n = profile.dimension();
  check_radial_params(params, n, "reduced functional");
  const auto& fn = profile.fn();
  NormResult zero;
  zero.functional = "reduced";
  if (fn.is_zero()) return zero;

  const double lambda = params.lambda;
  const RadialIntegrals table(fn, n);
  auto value_at = [&](double x) { return std::pow(x, lambda - n) * table.I(x); };

  Best best;
  for (std::size_t i = 0; i < fn.segment_count(); ++i) {
    const PowerPiece& p = fn.segment_piece(i);
    const double lo = fn.segment_begin(i);
    const double hi = fn.segment_end(i);
    const double e = n - p.beta;
    if (lo > 0.0) best.offer(value_at(lo), lo);
    if (p.is_zero()) continue;
    if (lo == 0.0) {
      if (p.beta > lambda) return divergent_result("reduced", 0.0);
      if (p.beta == lambda) best.offer(p.coeff / e, 0.0);
    }
    if (hi == kInf) {
      if (p.beta < lambda) return divergent_result("reduced", kInf);
      if (p.beta == lambda) best.offer(p.coeff / e, kInf);
    }
    const double xc = piece_critical_point(moment_offset(table.I(lo), p, lo, e), p, e, lambda, n, lo, hi);
    if (!std::isnan(xc)) best.offer(value_at(xc), xc);
  }
  return certify_radial("reduced", best, value_at, fn.breakpoints(), cfg, nullptr);
}

NormResult log_functional(const RadialProfile& profile, const MorreyParams& params,
                          const SupSearchConfig& cfg) {
  cfg.validate();
  const int n = profile.dimension();
  check_radial_params(params, n, "log functional");
  const auto& fn = profile.fn();
  NormResult zero;
  zero.functional = "log";
  if (fn.is_zero()) return zero;

  const double lambda = params.lambda;
  const RadialIntegrals table(fn, n);
  auto value_at = [&](double x) { return std::pow(x, lambda - n) * table.J(x); };
  // Sign of d/dx of value_at, up to the positive factor x^{λ-n-1}.
  auto slope = [&](double x) { return (lambda - n) * table.J(x) + table.I(x); };

  Best best;
  for (std::size_t i = 0; i < fn.segment_count(); ++i) {
    const PowerPiece& p = fn.segment_piece(i);
    const double lo = fn.segment_begin(i);
    const double hi = fn.segment_end(i);
    const double e = n - p.beta;
    if (lo > 0.0) best.offer(value_at(lo), lo);
    if (p.is_zero() && lo == 0.0) continue;
    if (!p.is_zero()) {
      if (lo == 0.0) {
        if (p.beta > lambda) return divergent_result("log", 0.0);
        if (p.beta == lambda) best.offer(p.coeff / (e * e), 0.0);
      }
      if (hi == kInf) {
        if (p.beta < lambda) return divergent_result("log", kInf);
        if (p.beta == lambda) best.offer(p.coeff / (e * e), kInf);
      }
    }

    // The slope has at most one turning point per piece (where the reduced
    // functional is stationary), so each half is monotone with at most one
    // root.
    const double xc = piece_critical_point(moment_offset(table.I(lo), p, lo, e), p, e, lambda, n, lo, hi);
    std::vector<double> cuts{lo};
    if (!std::isnan(xc)) cuts.push_back(xc);
    cuts.push_back(hi);
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
      const double u = cuts[s];
      double v = cuts[s + 1];
      // Near 0 on the first piece the slope behaves like (c/e²)(λ-β)x^e.
      const double gu = u == 0.0 ? p.coeff * (lambda - p.beta) : slope(u);
      double gv;
      if (v == kInf) {
        v = std::max(2.0 * u, 1.0);
        gv = slope(v);
        while (!((gv > 0.0) != (gu > 0.0)) && v < 1e300) {
          v *= 4.0;
          gv = slope(v);
        }
        if ((gv > 0.0) == (gu > 0.0)) continue;
      } else {
        gv = slope(v);
      }
      if (gu == 0.0 || gv == 0.0 || (gu > 0.0) == (gv > 0.0)) continue;
      const double root = bisect(slope, u, v, gu, cfg.bisection_tol);
      best.offer(value_at(root), root);
    }
  }
  return certify_radial("log", best, value_at, fn.breakpoints(), cfg, nullptr);
}

NormResult reduced_functional(const HardyTransform& hardy, const MorreyParams& params,
                              const SupSearchConfig& cfg) {
  cfg.validate();
  const int n = hardy.dimension();
  check_radial_params(params, n, "reduced functional");
  const double lambda = params.lambda;
  auto value_at = [&](double x) { return std::pow(x, lambda - n) * hardy.moment_integral(x); };

  NormResult zero;
  zero.functional = "reduced";
  const auto pieces = hardy.pieces();
  const bool all_zero = std::all_of(pieces.begin(), pieces.end(),
                                    [](const auto& p) { return p.a == 0.0 && p.b == 0.0; });
  if (all_zero) return zero;

  Best best;
  std::vector<double> bps;
  for (const auto& p : pieces) {
    bps.push_back(p.lo);
    const double e = n - p.beta;
    if (p.lo > 0.0) best.offer(value_at(p.lo), p.lo);
    if (p.b == 0.0) {
      // Pure t^{-n} piece: x^{λ-n}(M(lo) + a ln(x/lo)) is stationary at
      // ln(x/lo) = 1/(n-λ) - M(lo)/a.
      if (p.a > 0.0 && p.lo > 0.0) {
        const double x = p.lo * std::exp(1.0 / (n - lambda) - hardy.moment_integral(p.lo) / p.a);
        if (x > p.lo && x < p.hi) best.offer(value_at(x), x);
      }
      continue;
    }
    if (p.lo == 0.0) {
      if (p.beta > lambda) return divergent_result("reduced", 0.0);
      if (p.beta == lambda) best.offer(p.b / e, 0.0);
    }
    if (p.hi == kInf) {
      if (p.beta < lambda) return divergent_result("reduced", kInf);
      if (p.beta == lambda) best.offer(p.b / e, kInf);
    }
  }

  // Golden-section polish in log x around strict grid maxima close to the
  // current best.
  auto polish = [&](const std::vector<double>& xs, const std::vector<double>& vs, Best& b) {
    constexpr double kPhi = 0.6180339887498949;
    for (std::size_t k = 1; k + 1 < xs.size(); ++k) {
      if (!(vs[k] > vs[k - 1] && vs[k] >= vs[k + 1])) continue;
      if (vs[k] < b.value * (1.0 - 1e-2)) continue;
      double s0 = std::log(xs[k - 1]);
      double s1 = std::log(xs[k + 1]);
      double m0 = s1 - kPhi * (s1 - s0);
      double m1 = s0 + kPhi * (s1 - s0);
      double f0 = value_at(std::exp(m0));
      double f1 = value_at(std::exp(m1));
      for (int it = 0; it < 200 && (s1 - s0) > cfg.bisection_tol; ++it) {
        if (f0 < f1) {
          s0 = m0;
          m0 = m1;
          f0 = f1;
          m1 = s0 + kPhi * (s1 - s0);
          f1 = value_at(std::exp(m1));
        } else {
          s1 = m1;
          m1 = m0;
          f1 = f0;
          m0 = s1 - kPhi * (s1 - s0);
          f0 = value_at(std::exp(m0));
        }
      }
      const double x = std::exp(0.5 * (s0 + s1));
      b.offer(value_at(x), x);
    }
  };
  return certify_radial("reduced", best, value_at, bps, cfg, polish);
}

double LevelSet::measure() const {
  double total = 0.0;
  for (const auto& [a, b] : intervals) total += b - a;
  return total;
}

double LevelSet::measure_in(double lo, double hi) const {
  double total = 0.0;
  for (const auto& [a, b] : intervals) {
    const double l = std::max(a, lo);
    const double h = std::min(b, hi);
    if (h > l) total += h - l;
  }
  return total;
}

LevelSet maximal_level_set(const MaximalEvaluator& mf, double t, double lo, double hi, int cells,
                           double tol) {
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw InvalidInput("level set window must be a finite non-empty interval");
  }
  if (cells <= 0) throw InvalidInput("level set grid needs a positive cell count");
  std::vector<double> nodes;
  nodes.reserve(static_cast<std::size_t>(cells) + 1 + mf.breakpoints().size());
  for (int k = 0; k <= cells; ++k) nodes.push_back(lo + (hi - lo) * k / cells);
  for (double b : mf.breakpoints()) {
    if (b > lo && b < hi) nodes.push_back(b);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  std::vector<std::pair<double, double>> raw;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const double u = nodes[k];
    const double v = nodes[k + 1];
    const std::size_t j = mf.cell_of(0.5 * (u + v));
    if (mf.plateau(j) > t) {
      raw.emplace_back(u, v);
      continue;
    }
    auto crossing = [&](auto part) {
      double a = u;
      double b = v;
      const bool left_in = part(a) > t;
      while (b - a > tol) {
        const double mid = 0.5 * (a + b);
        if ((part(mid) > t) == left_in) a = mid; else b = mid;
      }
      return 0.5 * (a + b);
    };
    auto falling = [&](double x) { return mf.falling(j, x); };
    auto rising = [&](double x) { return mf.rising(j, x); };
    if (falling(u) > t) {
      if (falling(v) > t) {
        raw.emplace_back(u, v);
        continue;
      }
      raw.emplace_back(u, crossing(falling));
    }
    if (rising(v) > t) {
      if (rising(u) > t) {
        raw.emplace_back(u, v);
        continue;
      }
      raw.emplace_back(crossing(rising), v);
    }
  }
  std::sort(raw.begin(), raw.end());
  LevelSet out;
  for (const auto& iv : raw) {
    if (!out.intervals.empty() && iv.first <= out.intervals.back().second) {
      out.intervals.back().second = std::max(out.intervals.back().second, iv.second);
    } else {
      out.intervals.push_back(iv);
    }
  }
  return out;
}

namespace {

void check_weak_params(const MorreyParams& params) {
  if (params.n != 1 || params.p != 1.0) throw InvalidInput("weak-type ratio needs n = 1, p = 1");
  if (!(params.lambda > 0.0 && params.lambda < 1.0)) {
    throw InvalidInput("weak-type ratio needs 0 < lambda < 1");
  }
}

constexpr double kWeakTol = 1e-4;
constexpr int kWeakMaxLevels = 12;

}  // namespace

WeakTypeResult weak_type_ratio(const PiecewisePowerFn& f, double t, double x0, double r,
                               const MorreyParams& params, const SupSearchConfig& cfg) {
  cfg.validate();
  check_weak_params(params);
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidInput("weak-type level t must be > 0");
  if (!(r > 0.0) || !std::isfinite(r) || !std::isfinite(x0)) {
    throw InvalidInput("weak-type ball needs finite x0 and r > 0");
  }
  const double norm = morrey_norm_direct_1d(f, params, cfg).value;
  if (!(norm > 0.0)) throw InvalidInput("weak-type ratio needs a function with positive norm");
  const MaximalEvaluator mf(f);

  const double lo = x0 - r;
  const double hi = x0 + r;
  const double tol = cfg.bisection_tol * (hi - lo);
  double previous = -1.0;
  WeakTypeResult out;
  out.norm = norm;
  for (int level = 0; level < kWeakMaxLevels; ++level) {
    const double m = maximal_level_set(mf, t, lo, hi, cfg.points_per_decade << level, tol).measure();
    if (level > 0) {
      out.refine_delta = relative_change(m, previous);
      if (out.refine_delta <= kWeakTol) {
        out.measure = m;
        out.ratio = t * m / (std::pow(r, 1.0 - params.lambda) * norm);
        return out;
      }
    }
    previous = m;
  }
  throw NonConvergence("weak-type level-set measure did not stabilise to 1e-4");
}

WeakTypeSweep weak_type_sweep(const PiecewisePowerFn& f, const WeakTypeGrid& grid,
                              const MorreyParams& params, const SupSearchConfig& cfg,
                              int extra_levels) {
  cfg.validate();
  check_weak_params(params);
  if (grid.levels.empty() || grid.centers.empty() || grid.radii.empty()) {
    throw InvalidInput("weak-type grid must be non-empty in t, x0 and r");
  }
  if (extra_levels < 0) throw InvalidInput("extra_levels must be >= 0");
  WeakTypeSweep out;
  out.norm = morrey_norm_direct_1d(f, params, cfg).value;
  if (!(out.norm > 0.0)) throw InvalidInput("weak-type sweep needs a function with positive norm");
  const MaximalEvaluator mf(f);

  double lo = kInf;
  double hi = -kInf;
  for (double x0 : grid.centers) {
    for (double r : grid.radii) {
      if (!(r > 0.0)) throw InvalidInput("weak-type radii must be > 0");
      lo = std::min(lo, x0 - r);
      hi = std::max(hi, x0 + r);
    }
  }
  const double tol = cfg.bisection_tol * (hi - lo);
  const int level = cfg.refinement_levels + extra_levels;
  out.max_ratio = -1.0;
  for (double t : grid.levels) {
    if (!(t > 0.0)) throw InvalidInput("weak-type levels must be > 0");
    const LevelSet coarse = maximal_level_set(mf, t, lo, hi, cfg.points_per_decade << level, tol);
    const LevelSet fine = maximal_level_set(mf, t, lo, hi, cfg.points_per_decade << (level + 1), tol);
    for (double x0 : grid.centers) {
      for (double r : grid.radii) {
        const double m = fine.measure_in(x0 - r, x0 + r);
        const double mc = coarse.measure_in(x0 - r, x0 + r);
        out.refine_delta = std::max(out.refine_delta, relative_change(m, mc));
        const double ratio = t * m / (std::pow(r, 1.0 - params.lambda) * out.norm);
        ++out.evaluations;
        if (ratio > out.max_ratio) {
          out.max_ratio = ratio;
          out.t = t;
          out.x0 = x0;
          out.r = r;
        }
      }
    }
  }
  if (out.refine_delta > kWeakTol) {
    throw NonConvergence("weak-type sweep: level sets moved by " + format_number(out.refine_delta) +
                         " under refinement");
  }
  return out;
}

}  // namespace morreymax
