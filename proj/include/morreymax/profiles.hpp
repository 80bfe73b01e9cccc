#pragma once

/**
 * @file profiles.hpp
 * @brief Piecewise power-law functions and their exact moment integrals.
 *
 * Every function in the library is a PiecewisePowerFn: finitely many
 * breakpoints b_0 < ... < b_m, a piece c·ρ^{-β} on each [b_i, b_{i+1}),
 * a tail piece on [b_m, ∞), and zero to the left of b_0. Pieces are closed
 * on the left and open on the right.
 *
 * The class contains the step functions used as 1D test data (β = 0) and
 * the pure power laws ρ^{-β} used as radial profiles, and both
 *
 *     ∫_0^x φ(ρ) ρ^{n-1} dρ   and   ∫_0^x φ(ρ) ρ^{n-1} ln(x/ρ) dρ
 *
 * have per-piece closed-form antiderivatives.
 */

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace morreymax {

/// c·ρ^{-β} on one segment.
struct PowerPiece {
  double coeff = 0.0;
  double beta = 0.0;

  double at(double rho) const;
  bool is_zero() const noexcept { return coeff == 0.0; }
  bool is_constant() const noexcept { return coeff == 0.0 || beta == 0.0; }

  friend bool operator==(const PowerPiece&, const PowerPiece&) = default;
};

/// First violated invariant of a candidate function, with a JSON-pointer
/// style path ("/breakpoints/2", "/pieces/0/c", "/tail/beta").
struct SpecViolation {
  std::string path;
  std::string message;
};

std::optional<SpecViolation> find_violation(std::span<const double> breakpoints,
                                            std::span<const PowerPiece> pieces,
                                            const PowerPiece& tail);

class PiecewisePowerFn {
public:
  /// The zero function.
  PiecewisePowerFn() = default;

  /// Throws InvalidInput when find_violation reports anything. No merging is
  /// done here; call canonical() for the minimal representation.
  PiecewisePowerFn(std::vector<double> breakpoints, std::vector<PowerPiece> pieces,
                   PowerPiece tail = {});

  /// c·ρ^{-β} on (0, ∞).
  static PiecewisePowerFn power_law(double coeff, double beta);
  /// c·χ_[a,b).
  static PiecewisePowerFn block(double a, double b, double coeff = 1.0);
  /// c on (0, ∞).
  static PiecewisePowerFn constant(double coeff);

  std::span<const double> breakpoints() const noexcept { return breakpoints_; }
  std::span<const PowerPiece> pieces() const noexcept { return pieces_; }
  const PowerPiece& tail() const noexcept { return tail_; }

  /// Number of segments including the tail (0 for the zero function).
  std::size_t segment_count() const noexcept { return breakpoints_.size(); }
  /// Piece on segment i; segment_count()-1 is the tail.
  const PowerPiece& segment_piece(std::size_t i) const;
  double segment_begin(std::size_t i) const { return breakpoints_[i]; }
  /// +inf for the tail.
  double segment_end(std::size_t i) const;

  double operator()(double x) const;
  double left_limit(double x) const;

  bool is_zero() const noexcept;
  bool is_piecewise_constant() const noexcept;
  bool has_compact_support() const noexcept { return tail_.is_zero(); }

  /// Zero pieces get β = 0, identical neighbours merge, and leading and
  /// trailing zero segments are dropped.
  PiecewisePowerFn canonical() const;

  PiecewisePowerFn scaled(double factor) const;
  /// x ↦ f(s·x) for s > 0.
  PiecewisePowerFn dilated(double s) const;
  /// Same function with an extra breakpoint at x (no-op if x already is one).
  PiecewisePowerFn split_at(double x) const;
  /// x ↦ f(|x|) on ℝ. Requires non-negative breakpoints.
  PiecewisePowerFn even_extension() const;
  /// x ↦ f(x)^p.
  PiecewisePowerFn powered(double p) const;

  /// ∫_ℝ f for piecewise-constant f with compact support.
  double line_integral() const;

  friend bool operator==(const PiecewisePowerFn&, const PiecewisePowerFn&) = default;

private:
  std::size_t segment_of(double x) const;  // requires x >= b_0

  std::vector<double> breakpoints_;
  std::vector<PowerPiece> pieces_;
  PowerPiece tail_{};
};

/// Volume of the unit ball in ℝ^n: π^{n/2}/Γ(n/2+1).
double unit_ball_volume(int n);

struct MorreyParams {
  double p = 1.0;
  double lambda = 0.5;
  int n = 1;
  double unit_ball_volume = 2.0;

  /// Validates p >= 1, n >= 1, 0 <= λ <= n and fills ω_n.
  static MorreyParams make(double p, double lambda, int n);
};

/// f(x) = φ(|x|) on ℝ^n with φ non-negative and non-increasing on (0, ∞).
class RadialProfile {
public:
  RadialProfile(PiecewisePowerFn fn, int n);

  const PiecewisePowerFn& fn() const noexcept { return fn_; }
  int dimension() const noexcept { return n_; }
  double operator()(double rho) const { return fn_(rho); }

private:
  PiecewisePowerFn fn_;
  int n_;
};

struct MonotonicityCheck {
  bool ok = true;
  double location = 0.0;  ///< breakpoint where the jump up happens
  std::string reason;
};

/// True iff fn is non-negative and non-increasing on (0, ∞).
MonotonicityCheck validate_nonincreasing(const PiecewisePowerFn& fn);

/// Block positions for an indicator train: block k is
/// [start(k), start(k) + block_length] for k = first_index..K.
struct GapLaw {
  std::function<double(std::int64_t)> start;
  std::int64_t first_index = 0;
  std::int64_t max_index = 0;
  double block_length = 1.0;

  /// Blocks [k², k²+1], k >= 0; max_index keeps k²+1 exact in a double.
  static GapLaw squares();
  static GapLaw arithmetic(double spacing);
};

/// Σ_{k=first..K} χ_[start(k), start(k)+len], in canonical form.
PiecewisePowerFn make_indicator_train(std::int64_t count, const GapLaw& law = GapLaw::squares());

/// ∫_0^x fn(ρ) ρ^{n-1} dρ.
double moment_integral(const PiecewisePowerFn& fn, double x, int n);

/// ∫_0^x fn(ρ) ρ^{n-1} ln(x/ρ) dρ.
double log_moment_integral(const PiecewisePowerFn& fn, double x, int n);

}  // namespace morreymax
