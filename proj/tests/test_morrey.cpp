#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "morreymax/errors.hpp"
#include "morreymax/morrey.hpp"
#include "morreymax/verify.hpp"
#include "oracles.hpp"

using namespace morreymax;

namespace {

PiecewisePowerFn chi(double R) { return PiecewisePowerFn::block(0.0, R); }

MorreyParams params(double lambda, int n = 1, double p = 1.0) { return MorreyParams::make(p, lambda, n); }

double reduced(const PiecewisePowerFn& phi, double lambda, int n) {
  return reduced_functional(RadialProfile(phi, n), params(lambda, n)).value;
}

double logf(const PiecewisePowerFn& phi, double lambda, int n) {
  return log_functional(RadialProfile(phi, n), params(lambda, n)).value;
}

double direct(const PiecewisePowerFn& f, double lambda, double p = 1.0) {
  return morrey_norm_direct_1d(f, params(lambda, 1, p)).value;
}

// sup over all lattice intervals [i h, j h] of |I|^{(λ-1)/p} (∫_I f^p)^{1/p}.
double lattice_direct(const PiecewisePowerFn& f, double lambda, double p, long lo, long hi, double h) {
  std::vector<double> F(static_cast<std::size_t>(hi - lo + 1), 0.0);
  for (long k = lo; k < hi; ++k) {
    const double v = f((static_cast<double>(k) + 0.5) * h);
    F[static_cast<std::size_t>(k - lo + 1)] = F[static_cast<std::size_t>(k - lo)] + std::pow(v, p) * h;
  }
  double best = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i) {
    for (std::size_t j = i + 1; j < F.size(); ++j) {
      const double len = static_cast<double>(j - i) * h;
      best = std::max(best, std::pow(len, (lambda - 1.0) / p) * std::pow(F[j] - F[i], 1.0 / p));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("direct norm examples") {
  const auto block = morrey_norm_direct_1d(chi(1.0), params(0.5));
  CHECK(block.value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(block.argmax == 0.0);
  CHECK(block.argmax_end == 1.0);
  CHECK(block.argmax_text() == "0:1");
  CHECK(block.refine_delta <= 1e-6);

  for (std::int64_t K : {1, 10, 100}) {
    const auto train = morrey_norm_direct_1d(make_indicator_train(K), params(0.5));
    CHECK(train.value == doctest::Approx(std::numbers::sqrt2).epsilon(1e-14));
    CHECK(train.argmax == 0.0);
    CHECK(train.argmax_end == 2.0);
  }

  CHECK(morrey_norm_direct_1d(PiecewisePowerFn{}, params(0.5)).value == 0.0);
  CHECK(direct(chi(1.0), 0.5, 2.0) == doctest::Approx(1.0).epsilon(1e-14));

  CHECK_THROWS_AS(morrey_norm_direct_1d(chi(1.0), params(0.5, 2)), InvalidInput);
  CHECK_THROWS_AS(morrey_norm_direct_1d(PiecewisePowerFn::power_law(1.0, 0.5), params(0.5)),
                  InvalidInput);
}

TEST_CASE("direct norm against lattice intervals") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto f = oracle::lattice_step_function(seed, 10);
    for (double lambda : {0.25, 0.5, 0.8}) {
      for (double p : {1.0, 2.0}) {
        const double got = direct(f, lambda, p);
        const double grid = lattice_direct(f, lambda, p, -600, 600, 1e-2);
        CHECK(got >= grid * (1.0 - 1e-12));
        CHECK(got <= grid * (1.0 + 1e-3));
      }
    }
  }
}

TEST_CASE("reduced functional examples") {
  const auto block = reduced_functional(RadialProfile(chi(1.0), 1), params(0.5));
  CHECK(block.value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(block.argmax == doctest::Approx(1.0).epsilon(1e-12));

  for (int n : {1, 2, 3}) {
    for (double R : {0.5, 1.0, 8.0}) {
      const double lambda = 0.5 * n;
      CHECK(oracle::rel_err(reduced(chi(R), lambda, n), std::pow(R, lambda) / n) < 1e-12);
    }
  }

  for (auto [n, lambda] : {std::pair{1, 0.25}, {1, 0.5}, {2, 1.0}, {3, 2.0}}) {
    const auto sharp = PiecewisePowerFn::power_law(1.0, lambda);
    CHECK(oracle::rel_err(reduced(sharp, lambda, n), 1.0 / (n - lambda)) < 1e-12);
  }

  const auto off = reduced_functional(RadialProfile(PiecewisePowerFn::power_law(1.0, 0.3), 1), params(0.5));
  CHECK(off.divergent);
  CHECK(off.value == std::numeric_limits<double>::infinity());
  const auto off2 = reduced_functional(RadialProfile(PiecewisePowerFn::power_law(1.0, 0.7), 1), params(0.5));
  CHECK(off2.divergent);

  CHECK(reduced(PiecewisePowerFn{}, 0.5, 1) == 0.0);
  CHECK_THROWS_AS(reduced(chi(1.0), 1.0, 1), InvalidInput);
  CHECK_THROWS_AS(reduced(chi(1.0), 0.0, 1), InvalidInput);
}

TEST_CASE("log functional examples") {
  for (auto [n, lambda] : {std::pair{1, 0.25}, {1, 0.5}, {2, 1.0}, {3, 2.0}}) {
    const auto sharp = PiecewisePowerFn::power_law(1.0, lambda);
    const double want = 1.0 / ((n - lambda) * (n - lambda));
    CHECK(oracle::rel_err(logf(sharp, lambda, n), want) < 1e-12);
  }

  const auto block = log_functional(RadialProfile(chi(1.0), 1), params(0.5));
  CHECK(oracle::rel_err(block.value, 2.0 / std::sqrt(std::numbers::e)) < 1e-12);
  CHECK(oracle::rel_err(block.argmax, std::numbers::e) < 1e-8);
  CHECK(block.refine_delta <= 1e-8);

  // Dense log grid over [1e-2, 1e3] with quadrature log moments.
  double grid_best = 0.0;
  const int points = 100000;
  for (int i = 0; i < points; ++i) {
    const double x = std::pow(10.0, -2.0 + 5.0 * i / (points - 1.0));
    grid_best = std::max(grid_best, std::pow(x, -0.5) * oracle::log_moment(chi(1.0), x, 1));
  }
  CHECK(block.value >= grid_best * (1.0 - 1e-12));
  CHECK(oracle::rel_err(block.value, grid_best) < 1e-8);

  CHECK(logf(PiecewisePowerFn{}, 0.5, 1) == 0.0);
  CHECK(log_functional(RadialProfile(PiecewisePowerFn::power_law(1.0, 0.2), 2), params(1.0, 2)).divergent);
}

TEST_CASE("functionals are homogeneous") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto phi = random_step_profile(seed, 30);
    const auto line = phi.even_extension();
    for (int n : {1, 2}) {
      const double lambda = 0.4 * n;
      const double r0 = reduced(phi, lambda, n);
      const double l0 = logf(phi, lambda, n);
      for (double s : {2.0, 10.0, 1.0 / 3.0}) {
        CHECK(oracle::rel_err(reduced(phi.scaled(s), lambda, n), s * r0) < 1e-12);
        CHECK(oracle::rel_err(logf(phi.scaled(s), lambda, n), s * l0) < 1e-12);
      }
    }
    const double d0 = direct(line, 0.5);
    for (double s : {2.0, 10.0, 1.0 / 3.0}) {
      CHECK(oracle::rel_err(direct(line.scaled(s), 0.5), s * d0) < 1e-12);
    }
  }
}

TEST_CASE("reduced functional under dilation") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto phi = random_step_profile(seed + 100, 40);
    for (int n : {1, 3}) {
      const double lambda = 0.6 * n;
      const double base = reduced(phi, lambda, n);
      for (double s : {2.0, 0.5}) {
        CHECK(oracle::rel_err(reduced(phi.dilated(s), lambda, n), std::pow(s, -lambda) * base) < 1e-10);
      }
    }
  }
}

TEST_CASE("functionals are monotone") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto phi = random_step_profile(seed + 200, 25);
    // φ(0.7ρ) >= φ(ρ) for decreasing φ.
    const auto psi = phi.dilated(0.7).scaled(1.1);
    CHECK(reduced(phi, 0.5, 1) <= reduced(psi, 0.5, 1));
    CHECK(logf(phi, 0.5, 1) <= logf(psi, 0.5, 1));
    CHECK(direct(phi.even_extension(), 0.5) <= direct(psi.even_extension(), 0.5));
  }
}

TEST_CASE("log functional obeys the reduced bound") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto phi = random_step_profile(seed + 300, 30);
    for (int n : {1, 2, 3}) {
      for (double frac : {0.1, 0.5, 0.9}) {
        const double lambda = frac * n;
        CHECK(logf(phi, lambda, n) <= reduced(phi, lambda, n) / (n - lambda) + 1e-10);
      }
    }
  }
  CHECK(logf(chi(1.0), 0.5, 1) / reduced(chi(1.0), 0.5, 1) < 2.0);
}

TEST_CASE("config validation") {
  SupSearchConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.points_per_decade = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
  cfg = {};
  cfg.bisection_tol = 1e-3;
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
  cfg = {};
  cfg.refinement_levels = -1;
  CHECK_THROWS_AS(reduced_functional(RadialProfile(chi(1.0), 1), params(0.5), cfg), InvalidInput);
}

TEST_CASE("level sets of a single block") {
  // Mf = 1 on [0,1] and 1/(1 + dist(x, [0,1])) off it.
  const MaximalEvaluator mf(chi(1.0));
  for (double d : {0.1, 1.0, 7.5}) {
    CHECK(oracle::rel_err(mf(1.0 + d), 1.0 / (1.0 + d)) < 1e-15);
    CHECK(oracle::rel_err(mf(-d), 1.0 / (1.0 + d)) < 1e-15);
  }
  for (double t : {0.2, 0.5, 0.9}) {
    const auto set = maximal_level_set(mf, t, -20.0, 20.0, 64, 1e-12);
    CHECK(set.intervals.size() == 1);
    CHECK(std::abs(set.measure() - (2.0 / t - 1.0)) < 1e-10);
    CHECK(std::abs(set.measure_in(0.0, 20.0) - 1.0 / t) < 1e-10);
  }
  CHECK(maximal_level_set(mf, 1.0, -5.0, 5.0, 64, 1e-12).measure() == 0.0);
}

TEST_CASE("weak-type ratio") {
  const auto block = weak_type_ratio(chi(1.0), 0.5, 0.0, 2.0, params(0.5));
  CHECK(std::abs(block.measure - 3.0) < 1e-8);
  CHECK(oracle::rel_err(block.ratio, 1.5 / std::numbers::sqrt2) < 1e-8);
  CHECK(block.refine_delta <= 1e-4);

  CHECK(weak_type_ratio(chi(1.0), 1.5, 0.5, 3.0, params(0.5)).ratio == 0.0);

  const auto train = make_indicator_train(4);
  for (double t : {0.1, 0.3, 0.8}) {
    const double a = weak_type_ratio(train, t, 3.0, 5.0, params(0.5)).ratio;
    const double b = weak_type_ratio(train.scaled(5.0), 5.0 * t, 3.0, 5.0, params(0.5)).ratio;
    CHECK(oracle::rel_err(b, a) < 1e-12);
  }

  CHECK_THROWS_AS(weak_type_ratio(PiecewisePowerFn{}, 0.5, 0.0, 1.0, params(0.5)), InvalidInput);
  CHECK_THROWS_AS(weak_type_ratio(chi(1.0), 0.0, 0.0, 1.0, params(0.5)), InvalidInput);
  CHECK_THROWS_AS(weak_type_ratio(chi(1.0), 0.5, 0.0, -1.0, params(0.5)), InvalidInput);
}

TEST_CASE("weak-type sweep matches pointwise ratios") {
  const auto f = make_indicator_train(5);
  WeakTypeGrid grid{{0.2, 0.6}, {0.0, 4.5, 12.0}, {0.5, 3.0, 20.0}};
  const auto sweep = weak_type_sweep(f, grid, params(0.5));
  double best = 0.0;
  for (double t : grid.levels) {
    for (double x0 : grid.centers) {
      for (double r : grid.radii) best = std::max(best, weak_type_ratio(f, t, x0, r, params(0.5)).ratio);
    }
  }
  CHECK(sweep.evaluations == 18);
  CHECK(oracle::rel_err(sweep.max_ratio, best) < 1e-6);
}

TEST_CASE("norm rows serialize") {
  NormResult a;
  a.functional = "direct";
  a.value = std::numbers::sqrt2;
  a.argmax = 0.0;
  a.argmax_end = 2.0;
  NormResult b;
  b.functional = "reduced";
  b.value = 2.0;
  b.argmax = 1.0;
  std::vector<NormResult> rows{a, b};
  std::ostringstream out;
  write_norm_csv(out, rows);
  CHECK(out.str() == "functional,value,argmax,refine_delta\n"
                     "direct,1.4142135623730951,0:2,0\n"
                     "reduced,2,1,0\n");
}
