#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "morreymax/profiles.hpp"

namespace morreymax {

/// Mf(x) with an optimal interval [a, b] ∋ x.
struct MaximalEvaluation {
  double point = 0.0;
  double value = 0.0;
  double a = 0.0;
  double b = 0.0;
  bool degenerate = false;  ///< f ≡ 0; the witness collapses to [x, x]
};

/// Noncentered Hardy-Littlewood maximal function of a compactly supported
/// step function on ℝ, by exhaustive search over endpoints drawn from
/// breakpoints ∪ {x}. O(B²).
///
/// For fixed b the average over [a, b] is monotone in a on every constant
/// piece (its derivative has the sign of avg - f(a)), so an optimal a exists
/// among the candidates; the same holds for b.
MaximalEvaluation maximal_1d(const PiecewisePowerFn& f, double x);

/// Precomputed form of maximal_1d for many evaluations of the same f.
///
/// The breakpoints split ℝ into cells 0..B: cell 0 = (-inf, b_0),
/// cell j = (b_{j-1}, b_j), cell B = (b_{B-1}, inf). On a cell with value c,
///
///     Mf(x) = max(plateau_j, falling_j(x), rising_j(x))
///
/// where plateau_j is the best average over breakpoint intervals covering the
/// cell, falling_j(x) = max(c, sup_{a <= b_{j-1}} avg[a, x]) is non-increasing
/// and rising_j(x) = max(c, sup_{b >= b_j} avg[x, b]) is non-decreasing.
class MaximalEvaluator {
public:
  explicit MaximalEvaluator(const PiecewisePowerFn& f);

  double operator()(double x) const { return evaluate(x).value; }
  MaximalEvaluation evaluate(double x) const;

  std::size_t cell_count() const noexcept { return bps_.size() + 1; }
  /// Cell whose closure contains x (the left one at a breakpoint).
  std::size_t cell_of(double x) const;
  double cell_begin(std::size_t j) const;
  double cell_end(std::size_t j) const;
  double cell_value(std::size_t j) const { return values_[j]; }

  double plateau(std::size_t j) const { return plateau_[j]; }
  /// Closed-cell extensions: valid for x in the closure of cell j.
  double falling(std::size_t j, double x) const;
  double rising(std::size_t j, double x) const;
  double on_cell(std::size_t j, double x) const;

  /// sup f.
  double peak() const noexcept { return peak_; }
  double total_integral() const noexcept { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
  std::span<const double> breakpoints() const noexcept { return bps_; }

private:
  double cumulative_at(std::size_t j, double x) const;
  MaximalEvaluation evaluate_in_cell(std::size_t j, double x) const;

  std::vector<double> bps_;
  std::vector<double> values_;      // per cell, size B + 1
  std::vector<double> cumulative_;  // ∫_{-inf}^{b_i} f, size B
  std::vector<double> plateau_;
  std::vector<std::pair<double, double>> plateau_witness_;
  double peak_ = 0.0;
};

/// Explicit minorant of Mf for the square-lattice train Σ_{k=0}^{K} χ_[k², k²+1]:
///
///     1                      on [k², k²+1]
///     1/(x - k²)             on (k²+1, k²+k+1]          (k <= K)
///     1/((k+1)² + 1 - x)     on (k²+k+1, (k+1)²)        (k < K)
///
/// and 0 elsewhere. The half-open pieces make exactly one term active at
/// each x.
double maximal_lower_bound_train(std::int64_t K, double x);

/// ∫_0^X of maximal_lower_bound_train(K, ·), in closed form.
double lower_bound_train_integral(std::int64_t K, double X);

/// Hf(r) = (1/|B(0,r)|) ∫_{B(0,r)} f = (n/r^n) ∫_0^r φ(ρ) ρ^{n-1} dρ.
double hardy_radial(const RadialProfile& profile, double r);

/// Hf for a whole profile. On each profile segment [lo, hi) with piece
/// c·ρ^{-β} the transform is a two-term power sum
///
///     Hf(t) = a·t^{-n} + b·t^{-β},  a = n(I(lo) - c·lo^e/e),  b = n·c/e,  e = n - β,
///
/// so it leaves the single-term class and gets its own type.
class HardyTransform {
public:
  struct Piece {
    double lo = 0.0;
    double hi = 0.0;  ///< +inf on the last piece
    double a = 0.0;   ///< coefficient of t^{-n}
    double b = 0.0;   ///< coefficient of t^{-β}
    double beta = 0.0;
    double source_coeff = 0.0;  ///< c of the profile piece
  };

  explicit HardyTransform(const RadialProfile& profile);

  double operator()(double r) const;
  int dimension() const noexcept { return n_; }
  std::span<const Piece> pieces() const noexcept { return pieces_; }

  /// ∫_0^x Hf(t) t^{n-1} dt, integrating the two-term pieces in t.
  double moment_integral(double x) const;

private:
  const Piece* piece_at(double r) const;

  std::vector<Piece> pieces_;
  int n_;
};

/// Hf is non-increasing iff Hf(lo) >= φ(lo+) at every piece's left end,
/// because Hf' = (n/t)(φ - Hf) and Hf - φ increases along a piece.
MonotonicityCheck validate_nonincreasing(const HardyTransform& h);

/// |B(0,r)|^{(α-n)/n} ∫_{B(0,r)} |f|.
double fractional_ball_functional(const RadialProfile& profile, double alpha, double r);

/// f* on (0, ∞).
struct RearrangedFn {
  PiecewisePowerFn fn;
  double operator()(double t) const { return fn(t); }
};

/// f* for a step function on ℝ (Lebesgue measure on the line).
RearrangedFn decreasing_rearrangement(const PiecewisePowerFn& f);
/// f* for x ↦ φ(|x|) on ℝ^n; agrees with φ((t/ω_n)^{1/n}).
RearrangedFn decreasing_rearrangement(const RadialProfile& profile);

/// |{x ∈ ℝ : f(x) > level}|, step functions only.
double distribution_function(const PiecewisePowerFn& f, double level);
/// |{x ∈ ℝ^n : φ(|x|) > level}|, step profiles only.
double distribution_function(const RadialProfile& profile, double level);

/// CSV rows "x,value,a,b".
void write_maximal_csv(std::ostream& out, std::span<const MaximalEvaluation> rows);

}  // namespace morreymax
