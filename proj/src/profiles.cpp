#include "morreymax/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "morreymax/errors.hpp"
#include "morreymax/format.hpp"

namespace morreymax {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::optional<SpecViolation> piece_violation(const PowerPiece& piece, const std::string& path,
                                             double left_end) {
  if (!std::isfinite(piece.coeff) || piece.coeff < 0.0) {
    return SpecViolation{path + "/c", "coefficient must be finite and non-negative"};
  }
  if (!std::isfinite(piece.beta) || piece.beta < 0.0) {
    return SpecViolation{path + "/beta", "exponent must be finite and non-negative"};
  }
  if (piece.coeff > 0.0 && piece.beta > 0.0 && left_end < 0.0) {
    return SpecViolation{path + "/beta", "power pieces must lie in [0, inf)"};
  }
  return std::nullopt;
}

// Antiderivative of ρ^{e-1} ln(x/ρ).
double log_kernel_antiderivative(double rho, double x, double e) {
  if (e == 0.0) {
    const double l = std::log(x / rho);
    return -0.5 * l * l;
  }
  if (rho == 0.0) return 0.0;
  const double re = std::pow(rho, e);
  return re * (std::log(x / rho) / e + 1.0 / (e * e));
}

void check_moment_args(double x, int n) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidInput("moment integral needs finite x >= 0");
  if (n < 1) throw InvalidInput("dimension must be >= 1");
}

void check_origin_integrable(const PowerPiece& piece, double lo, int n) {
  if (lo == 0.0 && piece.coeff > 0.0 && piece.beta >= n) {
    throw NonIntegrable("piece c*rho^-" + format_number(piece.beta) +
                        " touches 0 with beta >= n = " + std::to_string(n));
  }
}

}  // namespace

double PowerPiece::at(double rho) const {
  if (coeff == 0.0) return 0.0;
  if (beta == 0.0) return coeff;
  return coeff * std::pow(rho, -beta);
}

std::optional<SpecViolation> find_violation(std::span<const double> breakpoints,
                                            std::span<const PowerPiece> pieces,
                                            const PowerPiece& tail) {
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    if (!std::isfinite(breakpoints[i])) {
      return SpecViolation{"/breakpoints/" + std::to_string(i), "breakpoint must be finite"};
    }
    if (i > 0 && !(breakpoints[i] > breakpoints[i - 1])) {
      return SpecViolation{"/breakpoints/" + std::to_string(i),
                           "breakpoints must be strictly increasing"};
    }
  }
  if (breakpoints.empty()) {
    if (!pieces.empty()) return SpecViolation{"/pieces", "pieces given without breakpoints"};
    if (!tail.is_zero()) return SpecViolation{"/tail", "tail must be zero without breakpoints"};
    return std::nullopt;
  }
  if (pieces.size() + 1 != breakpoints.size()) {
    return SpecViolation{"/pieces", "expected " + std::to_string(breakpoints.size() - 1) +
                                        " pieces for " + std::to_string(breakpoints.size()) +
                                        " breakpoints, got " + std::to_string(pieces.size())};
  }
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (auto v = piece_violation(pieces[i], "/pieces/" + std::to_string(i), breakpoints[i])) {
      return v;
    }
  }
  return piece_violation(tail, "/tail", breakpoints.back());
}

PiecewisePowerFn::PiecewisePowerFn(std::vector<double> breakpoints,
                                   std::vector<PowerPiece> pieces, PowerPiece tail)
    : breakpoints_(std::move(breakpoints)), pieces_(std::move(pieces)), tail_(tail) {
  if (auto v = find_violation(breakpoints_, pieces_, tail_)) {
    throw InvalidInput(v->path + ": " + v->message);
  }
}

PiecewisePowerFn PiecewisePowerFn::power_law(double coeff, double beta) {
  return PiecewisePowerFn({0.0}, {}, PowerPiece{coeff, beta});
}

PiecewisePowerFn PiecewisePowerFn::block(double a, double b, double coeff) {
  if (!(b > a)) throw InvalidInput("block needs a < b");
  return PiecewisePowerFn({a, b}, {PowerPiece{coeff, 0.0}});
}

PiecewisePowerFn PiecewisePowerFn::constant(double coeff) {
  return PiecewisePowerFn({0.0}, {}, PowerPiece{coeff, 0.0});
}

const PowerPiece& PiecewisePowerFn::segment_piece(std::size_t i) const {
  return i + 1 < breakpoints_.size() ? pieces_[i] : tail_;
}

double PiecewisePowerFn::segment_end(std::size_t i) const {
  return i + 1 < breakpoints_.size() ? breakpoints_[i + 1] : kInf;
}

std::size_t PiecewisePowerFn::segment_of(double x) const {
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  return static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
}

double PiecewisePowerFn::operator()(double x) const {
  if (breakpoints_.empty() || x < breakpoints_.front()) return 0.0;
  return segment_piece(segment_of(x)).at(x);
}

double PiecewisePowerFn::left_limit(double x) const {
  if (breakpoints_.empty() || x <= breakpoints_.front()) return 0.0;
  auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), x);
  const auto i = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
  return segment_piece(i).at(x);
}

bool PiecewisePowerFn::is_zero() const noexcept {
  return tail_.is_zero() &&
         std::all_of(pieces_.begin(), pieces_.end(), [](const PowerPiece& p) { return p.is_zero(); });
}

bool PiecewisePowerFn::is_piecewise_constant() const noexcept {
  return tail_.is_constant() && std::all_of(pieces_.begin(), pieces_.end(),
                                            [](const PowerPiece& p) { return p.is_constant(); });
}

PiecewisePowerFn PiecewisePowerFn::canonical() const {
  auto normal = [](PowerPiece p) { return p.is_zero() ? PowerPiece{} : p; };

  std::vector<double> bps;
  std::vector<PowerPiece> segs;  // one per breakpoint; the last is the tail
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    const PowerPiece p = normal(segment_piece(i));
    if (segs.empty() ? p.is_zero() : p == segs.back()) continue;
    bps.push_back(breakpoints_[i]);
    segs.push_back(p);
  }
  // Zero segments are only dropped at the front above; a trailing zero
  // segment becomes the tail and stays.
  if (bps.empty()) return PiecewisePowerFn{};
  PowerPiece tail = segs.back();
  segs.pop_back();
  return PiecewisePowerFn(std::move(bps), std::move(segs), tail);
}

PiecewisePowerFn PiecewisePowerFn::scaled(double factor) const {
  if (!(factor >= 0.0) || !std::isfinite(factor)) throw InvalidInput("scale factor must be >= 0");
  auto out = *this;
  for (auto& p : out.pieces_) p.coeff *= factor;
  out.tail_.coeff *= factor;
  return out;
}

PiecewisePowerFn PiecewisePowerFn::dilated(double s) const {
  if (!(s > 0.0) || !std::isfinite(s)) throw InvalidInput("dilation factor must be > 0");
  auto out = *this;
  for (auto& b : out.breakpoints_) b /= s;
  auto adjust = [s](PowerPiece& p) {
    if (p.beta != 0.0) p.coeff *= std::pow(s, -p.beta);
  };
  for (auto& p : out.pieces_) adjust(p);
  adjust(out.tail_);
  return out;
}

PiecewisePowerFn PiecewisePowerFn::split_at(double x) const {
  if (!std::isfinite(x)) throw InvalidInput("split point must be finite");
  if (breakpoints_.empty()) return PiecewisePowerFn({x}, {});
  if (std::binary_search(breakpoints_.begin(), breakpoints_.end(), x)) return *this;
  auto bps = breakpoints_;
  auto pieces = pieces_;
  if (x < bps.front()) {
    bps.insert(bps.begin(), x);
    pieces.insert(pieces.begin(), PowerPiece{});
  } else {
    const std::size_t i = segment_of(x);
    bps.insert(bps.begin() + static_cast<std::ptrdiff_t>(i) + 1, x);
    pieces.insert(pieces.begin() + static_cast<std::ptrdiff_t>(i), segment_piece(i));
  }
  return PiecewisePowerFn(std::move(bps), std::move(pieces), tail_);
}

PiecewisePowerFn PiecewisePowerFn::even_extension() const {
  if (breakpoints_.empty()) return {};
  if (breakpoints_.front() < 0.0) throw InvalidInput("even extension needs breakpoints >= 0");
  if (!is_piecewise_constant() || !has_compact_support()) {
    throw InvalidInput("even extension needs a compactly supported step function");
  }
  std::vector<double> bps;
  std::vector<PowerPiece> pieces;
  const std::size_t m = breakpoints_.size();
  for (std::size_t k = m; k-- > 0;) {
    bps.push_back(0.0 - breakpoints_[k]);  // avoids -0.0
    if (k > 0) pieces.push_back(pieces_[k - 1]);
  }
  if (breakpoints_.front() > 0.0) {
    pieces.push_back(PowerPiece{});
    bps.push_back(breakpoints_.front());
  }
  pieces.insert(pieces.end(), pieces_.begin(), pieces_.end());
  bps.insert(bps.end(), breakpoints_.begin() + 1, breakpoints_.end());
  return PiecewisePowerFn(std::move(bps), std::move(pieces)).canonical();
}

PiecewisePowerFn PiecewisePowerFn::powered(double p) const {
  if (!(p > 0.0) || !std::isfinite(p)) throw InvalidInput("power must be > 0");
  auto out = *this;
  auto apply = [p](PowerPiece& q) {
    if (q.is_zero()) return;
    q.coeff = std::pow(q.coeff, p);
    q.beta *= p;
  };
  for (auto& q : out.pieces_) apply(q);
  apply(out.tail_);
  return out;
}

double PiecewisePowerFn::line_integral() const {
  if (!is_piecewise_constant() || !has_compact_support()) {
    throw InvalidInput("line integral needs a compactly supported step function");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    total += pieces_[i].coeff * (breakpoints_[i + 1] - breakpoints_[i]);
  }
  return total;
}

double unit_ball_volume(int n) {
  if (n < 1) throw InvalidInput("dimension must be >= 1");
  const double half = 0.5 * n;
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

MorreyParams MorreyParams::make(double p, double lambda, int n) {
  if (n < 1) throw InvalidInput("dimension n must be >= 1");
  if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidInput("p must be >= 1");
  if (!(lambda >= 0.0 && lambda <= n)) {
    throw InvalidInput("lambda must lie in [0, n] (n = " + std::to_string(n) + ")");
  }
  return MorreyParams{p, lambda, n, morreymax::unit_ball_volume(n)};
}

RadialProfile::RadialProfile(PiecewisePowerFn fn, int n) : fn_(std::move(fn)), n_(n) {
  if (n < 1) throw InvalidInput("dimension must be >= 1");
  const auto bps = fn_.breakpoints();
  if (!bps.empty() && bps.front() < 0.0) {
    throw InvalidInput("radial profile breakpoints must be >= 0");
  }
  for (std::size_t i = 0; i < fn_.segment_count(); ++i) {
    const auto& p = fn_.segment_piece(i);
    if (!p.is_zero() && p.beta >= n) {
      throw InvalidInput("radial profile exponent " + format_number(p.beta) +
                         " must be < n = " + std::to_string(n));
    }
  }
  if (auto check = validate_nonincreasing(fn_); !check.ok) {
    throw InvalidInput("radial profile is not non-increasing: " + check.reason);
  }
}

MonotonicityCheck validate_nonincreasing(const PiecewisePowerFn& fn) {
  // Pieces are non-increasing on their own (c >= 0, β >= 0), so only the
  // jumps at positive breakpoints can violate monotonicity.
  for (double b : fn.breakpoints()) {
    if (b <= 0.0) continue;
    const double left = fn.left_limit(b);
    const double right = fn(b);
    if (right > left * (1.0 + 1e-12)) {
      return {false, b,
              "jump up at rho = " + format_number(b) + " from " + format_number(left) + " to " +
                  format_number(right)};
    }
  }
  return {};
}

GapLaw GapLaw::squares() {
  GapLaw law;
  law.start = [](std::int64_t k) { return static_cast<double>(k * k); };
  law.first_index = 0;
  law.max_index = 94906265;  // k² + 1 < 2^53
  law.block_length = 1.0;
  return law;
}

GapLaw GapLaw::arithmetic(double spacing) {
  if (!(spacing >= 1.0) || !std::isfinite(spacing)) {
    throw InvalidInput("arithmetic gap law needs spacing >= 1 (blocks have unit length)");
  }
  GapLaw law;
  law.start = [spacing](std::int64_t k) { return spacing * static_cast<double>(k); };
  law.first_index = 0;
  law.max_index = static_cast<std::int64_t>(9.0e15 / spacing);
  law.block_length = 1.0;
  return law;
}

PiecewisePowerFn make_indicator_train(std::int64_t count, const GapLaw& law) {
  if (count < law.first_index) {
    throw InvalidInput("indicator train needs K >= " + std::to_string(law.first_index));
  }
  if (count > law.max_index) {
    throw InvalidInput("indicator train K = " + std::to_string(count) +
                       " overflows exact block positions (max " + std::to_string(law.max_index) +
                       ")");
  }
  std::vector<double> bps;
  std::vector<PowerPiece> pieces;
  for (std::int64_t k = law.first_index; k <= count; ++k) {
    const double a = law.start(k);
    const double b = a + law.block_length;
    if (!bps.empty()) {
      if (a < bps.back()) throw InvalidInput("gap law produces overlapping blocks");
      if (a == bps.back()) {
        bps.back() = b;  // touching blocks merge
        continue;
      }
      pieces.push_back(PowerPiece{});
    }
    bps.push_back(a);
    bps.push_back(b);
    pieces.push_back(PowerPiece{1.0, 0.0});
  }
  return PiecewisePowerFn(std::move(bps), std::move(pieces)).canonical();
}

double moment_integral(const PiecewisePowerFn& fn, double x, int n) {
  check_moment_args(x, n);
  double total = 0.0;
  for (std::size_t i = 0; i < fn.segment_count(); ++i) {
    const double lo = std::max(fn.segment_begin(i), 0.0);
    const double hi = std::min(fn.segment_end(i), x);
    if (!(hi > lo)) {
      if (fn.segment_begin(i) >= x) break;
      continue;
    }
    const PowerPiece& p = fn.segment_piece(i);
    if (p.is_zero()) continue;
    check_origin_integrable(p, lo, n);
    const double e = n - p.beta;
    if (e == 0.0) {
      total += p.coeff * std::log(hi / lo);
    } else {
      total += p.coeff * (std::pow(hi, e) - std::pow(lo, e)) / e;
    }
  }
  return total;
}

double log_moment_integral(const PiecewisePowerFn& fn, double x, int n) {
  check_moment_args(x, n);
  if (x == 0.0) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < fn.segment_count(); ++i) {
    const double lo = std::max(fn.segment_begin(i), 0.0);
    const double hi = std::min(fn.segment_end(i), x);
    if (!(hi > lo)) {
      if (fn.segment_begin(i) >= x) break;
      continue;
    }
    const PowerPiece& p = fn.segment_piece(i);
    if (p.is_zero()) continue;
    check_origin_integrable(p, lo, n);
    const double e = n - p.beta;
    total += p.coeff * (log_kernel_antiderivative(hi, x, e) - log_kernel_antiderivative(lo, x, e));
  }
  return total;
}

}  // namespace morreymax
