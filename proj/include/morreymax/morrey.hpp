#pragma once

/**
 * @file morrey.hpp
 * @brief Morrey-norm functionals on the piecewise power-law class.
 *
 * Three suprema are computed here:
 *
 *   direct   sup_I |I|^{(λ-1)/p} (∫_I f^p)^{1/p}          over intervals I ⊂ ℝ
 *   reduced  sup_{x>0} x^{λ-n} ∫_0^x φ(ρ) ρ^{n-1} dρ
 *   log      sup_{x>0} x^{λ-n} ∫_0^x φ(ρ) ρ^{n-1} ln(x/ρ) dρ
 *
 * The direct norm normalizes by the interval length |I| rather than the
 * radius; the two differ by the constant 2^{(1-λ)/p}.
 *
 * Each supremum is located from an exact candidate set (breakpoints,
 * per-piece critical points, end limits) and then certified against a
 * logarithmic grid refined `refinement_levels` times. `refine_delta` is the
 * relative change of the best value at the last refinement.
 */

#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "morreymax/operators.hpp"
#include "morreymax/profiles.hpp"

namespace morreymax {

struct SupSearchConfig {
  int points_per_decade = 64;
  int refinement_levels = 3;
  double bisection_tol = 1e-10;
  /// Largest refine_delta accepted before NonConvergence is thrown.
  double max_refine_delta = 1e-6;
  /// Anchors sampled by the direct-norm grid certificate.
  int max_grid_anchors = 64;

  /// Throws InvalidInput on non-positive counts or tol outside (0, 1e-4].
  void validate() const;
};

struct NormResult {
  std::string functional;
  double value = 0.0;
  /// Point attaining the supremum; 0 and inf stand for the limits x→0+ and
  /// x→∞. For the direct norm this is the left end of the witness interval.
  double argmax = 0.0;
  /// Right end of the witness interval (direct norm only), NaN otherwise.
  double argmax_end = std::numeric_limits<double>::quiet_NaN();
  double refine_delta = 0.0;
  bool divergent = false;

  std::string argmax_text() const;
};

/// CSV "functional,value,argmax,refine_delta".
void write_norm_csv(std::ostream& out, std::span<const NormResult> rows);

NormResult morrey_norm_direct_1d(const PiecewisePowerFn& f, const MorreyParams& params,
                                 const SupSearchConfig& cfg = {});

NormResult reduced_functional(const RadialProfile& profile, const MorreyParams& params,
                              const SupSearchConfig& cfg = {});

/// Same supremum taken over the Hardy transform, with the sup located by a
/// refined log grid and golden-section polishing rather than by the
/// per-piece closed forms. Used as the second route in Fubini checks.
NormResult reduced_functional(const HardyTransform& hardy, const MorreyParams& params,
                              const SupSearchConfig& cfg = {});

NormResult log_functional(const RadialProfile& profile, const MorreyParams& params,
                          const SupSearchConfig& cfg = {});

/// Finite union of disjoint closed intervals.
struct LevelSet {
  std::vector<std::pair<double, double>> intervals;

  double measure() const;
  double measure_in(double lo, double hi) const;
};

/// {Mf > t} ∩ [lo, hi]. The window is cut at every breakpoint and into
/// `cells` uniform sub-intervals; on each sub-interval the crossings of
/// the monotone parts of Mf are bisected to `tol` (absolute, in x).
LevelSet maximal_level_set(const MaximalEvaluator& mf, double t, double lo, double hi, int cells,
                           double tol);

struct WeakTypeResult {
  double ratio = 0.0;
  double measure = 0.0;  ///< |{Mf > t} ∩ B(x0, r)|
  double norm = 0.0;     ///< ‖f‖_{M_{1,λ}}
  double refine_delta = 0.0;
};

/// t·|{Mf > t} ∩ B(x0, r)| / (r^{1-λ} ‖f‖_{M_{1,λ}}) for n = 1, p = 1.
/// The level-set grid is doubled until the measure changes by at most 1e-4
/// relative.
WeakTypeResult weak_type_ratio(const PiecewisePowerFn& f, double t, double x0, double r,
                               const MorreyParams& params, const SupSearchConfig& cfg = {});

struct WeakTypeGrid {
  std::vector<double> levels;   ///< t values
  std::vector<double> centers;  ///< x0 values
  std::vector<double> radii;    ///< r values
};

struct WeakTypeSweep {
  double max_ratio = 0.0;
  double t = 0.0;
  double x0 = 0.0;
  double r = 0.0;
  double norm = 0.0;
  double refine_delta = 0.0;
  std::size_t evaluations = 0;
};

/// Max of weak_type_ratio over the full grid. Level sets are computed once
/// per t over the union of all balls and refined `extra_levels` times beyond
/// the base grid.
WeakTypeSweep weak_type_sweep(const PiecewisePowerFn& f, const WeakTypeGrid& grid,
                              const MorreyParams& params, const SupSearchConfig& cfg = {},
                              int extra_levels = 0);

}  // namespace morreymax
