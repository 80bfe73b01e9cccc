#include "morreymax/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "morreymax/errors.hpp"
#include "morreymax/format.hpp"

namespace morreymax {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTieTol = 1e-14;

void require_step_function(const PiecewisePowerFn& f, const char* who) {
  if (!f.is_piecewise_constant()) {
    throw InvalidInput(std::string(who) + " requires beta = 0 on every piece");
  }
  if (!f.has_compact_support()) {
    throw InvalidInput(std::string(who) + " requires a zero tail (compact support)");
  }
}

// Running best (value, interval) with ties resolved towards longer intervals.
struct BestInterval {
  double value = -1.0;
  double a = 0.0;
  double b = 0.0;

  void offer(double v, double lo, double hi) {
    if (v > value * (1.0 + kTieTol) ||
        (v >= value * (1.0 - kTieTol) && hi - lo > b - a)) {
      value = v;
      a = lo;
      b = hi;
    }
  }
};

std::int64_t floor_sqrt(double x) {
  auto k = static_cast<std::int64_t>(std::floor(std::sqrt(x)));
  while (static_cast<double>((k + 1) * (k + 1)) <= x) ++k;
  while (k > 0 && static_cast<double>(k * k) > x) --k;
  return k;
}

template <typename Measure>
RearrangedFn rearrange(const PiecewisePowerFn& f, Measure measure) {
  const double tail = f.tail().coeff;
  std::vector<std::pair<double, double>> levels;  // (value, measure)
  for (std::size_t i = 0; i + 1 < f.segment_count(); ++i) {
    const double v = f.segment_piece(i).coeff;
    if (v > tail) levels.emplace_back(v, measure(f.segment_begin(i), f.segment_end(i)));
  }
  std::stable_sort(levels.begin(), levels.end(),
                   [](const auto& l, const auto& r) { return l.first > r.first; });
  std::vector<double> bps{0.0};
  std::vector<PowerPiece> pieces;
  double t = 0.0;
  for (std::size_t i = 0; i < levels.size();) {
    const double v = levels[i].first;
    double m = 0.0;
    for (; i < levels.size() && levels[i].first == v; ++i) m += levels[i].second;
    t += m;
    bps.push_back(t);
    pieces.push_back(PowerPiece{v, 0.0});
  }
  return RearrangedFn{PiecewisePowerFn(std::move(bps), std::move(pieces), PowerPiece{tail, 0.0})
                          .canonical()};
}

template <typename Measure>
double distribution(const PiecewisePowerFn& f, double level, Measure measure) {
  if (level < 0.0) return kInf;
  if (f.tail().coeff > level) return kInf;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < f.segment_count(); ++i) {
    if (f.segment_piece(i).coeff > level) total += measure(f.segment_begin(i), f.segment_end(i));
  }
  return total;
}

}  // namespace

MaximalEvaluation maximal_1d(const PiecewisePowerFn& f, double x) {
  require_step_function(f, "maximal_1d");
  if (!std::isfinite(x)) throw InvalidInput("maximal_1d needs a finite point");
  if (f.is_zero()) return {x, 0.0, x, x, true};

  const auto bps = f.breakpoints();
  std::vector<double> cumulative(bps.size(), 0.0);
  for (std::size_t i = 1; i < bps.size(); ++i) {
    cumulative[i] = cumulative[i - 1] + f.segment_piece(i - 1).coeff * (bps[i] - bps[i - 1]);
  }
  auto primitive = [&](double t) {
    if (t <= bps.front()) return 0.0;
    auto it = std::upper_bound(bps.begin(), bps.end(), t);
    const auto i = static_cast<std::size_t>(it - bps.begin()) - 1;
    return cumulative[i] + f.segment_piece(i).coeff * (t - bps[i]);
  };

  std::vector<double> left{x};
  std::vector<double> right{x};
  for (double b : bps) {
    if (b < x) left.push_back(b);
    if (b > x) right.push_back(b);
  }
  std::sort(left.begin(), left.end());
  std::sort(right.begin(), right.end());

  BestInterval best;
  for (double a : left) {
    const double fa = primitive(a);
    for (double b : right) {
      if (!(b > a)) continue;
      best.offer((primitive(b) - fa) / (b - a), a, b);
    }
  }
  return {x, best.value, best.a, best.b, false};
}

MaximalEvaluator::MaximalEvaluator(const PiecewisePowerFn& f) {
  require_step_function(f, "MaximalEvaluator");
  const auto bps = f.breakpoints();
  bps_.assign(bps.begin(), bps.end());
  const std::size_t B = bps_.size();
  values_.assign(B + 1, 0.0);
  for (std::size_t j = 1; j < B; ++j) values_[j] = f.segment_piece(j - 1).coeff;
  peak_ = values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());

  cumulative_.assign(B, 0.0);
  for (std::size_t i = 1; i < B; ++i) {
    cumulative_[i] = cumulative_[i - 1] + values_[i] * (bps_[i] - bps_[i - 1]);
  }

  // plateau_j = max over i <= j-1 < j <= k of avg[b_i, b_k]: sweep i, keep a
  // suffix maximum over k, fold it into every cell it covers.
  plateau_.assign(B + 1, 0.0);
  plateau_witness_.assign(B + 1, {0.0, 0.0});
  std::vector<BestInterval> best(B + 1);
  std::vector<BestInterval> suffix(B + 1);
  for (std::size_t i = 0; i + 1 < B; ++i) {
    BestInterval run;
    for (std::size_t k = B - 1; k > i; --k) {
      run.offer((cumulative_[k] - cumulative_[i]) / (bps_[k] - bps_[i]), bps_[i], bps_[k]);
      suffix[k] = run;
    }
    for (std::size_t j = i + 1; j < B; ++j) {
      best[j].offer(suffix[j].value, suffix[j].a, suffix[j].b);
    }
  }
  for (std::size_t j = 1; j < B; ++j) {
    plateau_[j] = std::max(best[j].value, 0.0);
    plateau_witness_[j] = {best[j].a, best[j].b};
  }
}

std::size_t MaximalEvaluator::cell_of(double x) const {
  return static_cast<std::size_t>(std::lower_bound(bps_.begin(), bps_.end(), x) - bps_.begin());
}

double MaximalEvaluator::cell_begin(std::size_t j) const { return j == 0 ? -kInf : bps_[j - 1]; }

double MaximalEvaluator::cell_end(std::size_t j) const {
  return j >= bps_.size() ? kInf : bps_[j];
}

double MaximalEvaluator::cumulative_at(std::size_t j, double x) const {
  if (j == 0) return 0.0;
  return cumulative_[j - 1] + values_[j] * (x - bps_[j - 1]);
}

double MaximalEvaluator::falling(std::size_t j, double x) const {
  double best = values_[j];
  const double fx = cumulative_at(j, x);
  for (std::size_t i = 0; i < j; ++i) {
    if (bps_[i] < x) best = std::max(best, (fx - cumulative_[i]) / (x - bps_[i]));
  }
  return best;
}

double MaximalEvaluator::rising(std::size_t j, double x) const {
  double best = values_[j];
  const double fx = cumulative_at(j, x);
  for (std::size_t i = j; i < bps_.size(); ++i) {
    if (bps_[i] > x) best = std::max(best, (cumulative_[i] - fx) / (bps_[i] - x));
  }
  return best;
}

double MaximalEvaluator::on_cell(std::size_t j, double x) const {
  return std::max({plateau_[j], falling(j, x), rising(j, x)});
}

MaximalEvaluation MaximalEvaluator::evaluate_in_cell(std::size_t j, double x) const {
  BestInterval best;
  const double c = values_[j];
  if (c > 0.0) best.offer(c, cell_begin(j), cell_end(j));
  if (plateau_[j] > 0.0) best.offer(plateau_[j], plateau_witness_[j].first, plateau_witness_[j].second);
  const double fx = cumulative_at(j, x);
  for (std::size_t i = 0; i < j; ++i) {
    if (bps_[i] < x) best.offer((fx - cumulative_[i]) / (x - bps_[i]), bps_[i], x);
  }
  for (std::size_t i = j; i < bps_.size(); ++i) {
    if (bps_[i] > x) best.offer((cumulative_[i] - fx) / (bps_[i] - x), x, bps_[i]);
  }
  return {x, std::max(best.value, 0.0), best.a, best.b, false};
}

MaximalEvaluation MaximalEvaluator::evaluate(double x) const {
  if (!std::isfinite(x)) throw InvalidInput("maximal function needs a finite point");
  if (peak_ == 0.0) return {x, 0.0, x, x, true};
  const std::size_t j = cell_of(x);
  auto r = evaluate_in_cell(j, x);
  if (j < bps_.size() && bps_[j] == x) {
    auto other = evaluate_in_cell(j + 1, x);
    if (other.value > r.value) r = other;
  }
  return r;
}

double maximal_lower_bound_train(std::int64_t K, double x) {
  if (K < 0) throw InvalidInput("train size K must be >= 0");
  if (!(x >= 0.0) || !std::isfinite(x)) return 0.0;
  const std::int64_t k = floor_sqrt(x);
  if (k > K) return 0.0;
  const double k2 = static_cast<double>(k * k);
  if (x <= k2 + 1.0) return 1.0;
  if (x <= k2 + static_cast<double>(k) + 1.0) return 1.0 / (x - k2);
  if (k < K) return 1.0 / (static_cast<double>((k + 1) * (k + 1)) + 1.0 - x);
  return 0.0;
}

double lower_bound_train_integral(std::int64_t K, double X) {
  if (K < 0) throw InvalidInput("train size K must be >= 0");
  if (!(X > 0.0)) return 0.0;
  double total = 0.0;
  const std::int64_t top = std::min<std::int64_t>(K, floor_sqrt(X));
  for (std::int64_t k = 0; k <= top; ++k) {
    const double k2 = static_cast<double>(k * k);
    const double next2 = static_cast<double>((k + 1) * (k + 1));
    total += std::max(0.0, std::min(k2 + 1.0, X) - k2);
    {
      const double lo = k2 + 1.0;
      const double hi = std::min(k2 + static_cast<double>(k) + 1.0, X);
      if (hi > lo) total += std::log(hi - k2);
    }
    if (k < K) {
      const double lo = k2 + static_cast<double>(k) + 1.0;
      const double hi = std::min(next2, X);
      if (hi > lo) total += std::log((next2 + 1.0 - lo) / (next2 + 1.0 - hi));
    }
  }
  return total;
}

double hardy_radial(const RadialProfile& profile, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidInput("Hardy operator needs r > 0");
  const int n = profile.dimension();
  return n * moment_integral(profile.fn(), r, n) / std::pow(r, n);
}

HardyTransform::HardyTransform(const RadialProfile& profile) : n_(profile.dimension()) {
  const auto& fn = profile.fn();
  for (std::size_t i = 0; i < fn.segment_count(); ++i) {
    const PowerPiece& p = fn.segment_piece(i);
    Piece h;
    h.lo = fn.segment_begin(i);
    h.hi = fn.segment_end(i);
    h.source_coeff = p.coeff;
    if (!p.is_zero()) {
      const double e = n_ - p.beta;
      h.beta = p.beta;
      h.b = n_ * p.coeff / e;
      h.a = h.lo == 0.0 ? 0.0
                        : n_ * (morreymax::moment_integral(fn, h.lo, n_) - p.coeff * std::pow(h.lo, e) / e);
    } else {
      h.a = n_ * morreymax::moment_integral(fn, h.lo, n_);
    }
    pieces_.push_back(h);
  }
}

const HardyTransform::Piece* HardyTransform::piece_at(double r) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), r,
                             [](double v, const Piece& p) { return v < p.lo; });
  if (it == pieces_.begin()) return nullptr;
  return &*std::prev(it);
}

double HardyTransform::operator()(double r) const {
  if (!(r > 0.0)) throw InvalidInput("Hardy transform needs r > 0");
  const Piece* p = piece_at(r);
  if (p == nullptr) return 0.0;
  double v = p->a == 0.0 ? 0.0 : p->a * std::pow(r, -n_);
  if (p->b != 0.0) v += p->beta == 0.0 ? p->b : p->b * std::pow(r, -p->beta);
  return v;
}

double HardyTransform::moment_integral(double x) const {
  if (!(x >= 0.0)) throw InvalidInput("moment integral needs x >= 0");
  double total = 0.0;
  for (const Piece& p : pieces_) {
    if (p.lo >= x) break;
    const double hi = std::min(p.hi, x);
    if (p.a != 0.0) total += p.a * std::log(hi / p.lo);
    if (p.b != 0.0) {
      const double e = n_ - p.beta;
      total += p.b * (std::pow(hi, e) - std::pow(p.lo, e)) / e;
    }
  }
  return total;
}

MonotonicityCheck validate_nonincreasing(const HardyTransform& h) {
  for (const auto& p : h.pieces()) {
    if (p.lo <= 0.0) continue;
    const double source = p.beta == 0.0 ? p.source_coeff : p.source_coeff * std::pow(p.lo, -p.beta);
    const double value = h(p.lo);
    if (source > value * (1.0 + 1e-12)) {
      return {false, p.lo,
              "profile value " + format_number(source) + " exceeds its average " +
                  format_number(value) + " at r = " + format_number(p.lo)};
    }
  }
  return {};
}

double fractional_ball_functional(const RadialProfile& profile, double alpha, double r) {
  const int n = profile.dimension();
  if (!(alpha >= 0.0 && alpha < n)) throw InvalidInput("alpha must lie in [0, n)");
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidInput("radius must be > 0");
  const double omega = unit_ball_volume(n);
  const double ball = omega * std::pow(r, n);
  return std::pow(ball, (alpha - n) / n) * n * omega * moment_integral(profile.fn(), r, n);
}

RearrangedFn decreasing_rearrangement(const PiecewisePowerFn& f) {
  if (!f.is_piecewise_constant()) throw InvalidInput("rearrangement requires beta = 0 on every piece");
  return rearrange(f, [](double lo, double hi) { return hi - lo; });
}

RearrangedFn decreasing_rearrangement(const RadialProfile& profile) {
  if (!profile.fn().is_piecewise_constant()) {
    throw InvalidInput("rearrangement requires beta = 0 on every piece");
  }
  const int n = profile.dimension();
  const double omega = unit_ball_volume(n);
  return rearrange(profile.fn(), [=](double lo, double hi) {
    return omega * (std::pow(hi, n) - std::pow(lo, n));
  });
}

double distribution_function(const PiecewisePowerFn& f, double level) {
  if (!f.is_piecewise_constant()) throw InvalidInput("distribution function requires beta = 0");
  return distribution(f, level, [](double lo, double hi) { return hi - lo; });
}

double distribution_function(const RadialProfile& profile, double level) {
  if (!profile.fn().is_piecewise_constant()) {
    throw InvalidInput("distribution function requires beta = 0");
  }
  const int n = profile.dimension();
  const double omega = unit_ball_volume(n);
  return distribution(profile.fn(), level, [=](double lo, double hi) {
    return omega * (std::pow(hi, n) - std::pow(lo, n));
  });
}

void write_maximal_csv(std::ostream& out, std::span<const MaximalEvaluation> rows) {
  out << "x,value,a,b\n";
  for (const auto& r : rows) {
    out << format_number(r.point) << ',' << format_number(r.value) << ',' << format_number(r.a)
        << ',' << format_number(r.b) << '\n';
  }
}

}  // namespace morreymax
