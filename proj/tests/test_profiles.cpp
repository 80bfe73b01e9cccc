#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "morreymax/errors.hpp"
#include "morreymax/profiles.hpp"
#include "morreymax/spec_io.hpp"
#include "morreymax/verify.hpp"
#include "oracles.hpp"

using namespace morreymax;

namespace {

PiecewisePowerFn chi01() { return PiecewisePowerFn::block(0.0, 1.0); }

// Random decreasing profile mixing a singular first piece with power pieces.
PiecewisePowerFn random_power_profile(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> bps{0.0};
  for (int k = 0; k < 6; ++k) bps.push_back(bps.back() + 0.1 + 2.0 * u(rng));
  std::vector<PowerPiece> pieces{PowerPiece{0.5 + u(rng), 0.9 * n * u(rng)}};
  for (std::size_t k = 1; k + 1 < bps.size(); ++k) {
    const double beta = 1.5 * u(rng);
    const double v = pieces.back().at(bps[k]) * (0.3 + 0.7 * u(rng));
    pieces.push_back(PowerPiece{v * std::pow(bps[k], beta), beta});
  }
  return PiecewisePowerFn(bps, pieces);
}

}  // namespace

TEST_CASE("indicator trains") {
  const auto k1 = make_indicator_train(1);
  CHECK(k1.breakpoints().size() == 2);
  CHECK(k1.breakpoints()[0] == 0.0);
  CHECK(k1.breakpoints()[1] == 2.0);
  CHECK(k1(1.5) == 1.0);
  CHECK(k1(2.0) == 0.0);

  CHECK(make_indicator_train(0) == chi01());

  const auto k3 = make_indicator_train(3);
  const std::vector<double> want{0, 2, 4, 5, 9, 10};
  CHECK(std::vector<double>(k3.breakpoints().begin(), k3.breakpoints().end()) == want);
  CHECK(k3.line_integral() == doctest::Approx(4.0).epsilon(1e-15));

  const auto k10 = make_indicator_train(10);
  CHECK(k10.breakpoints().size() == 2 * 11 - 2);

  CHECK_THROWS_AS(make_indicator_train(-1), InvalidInput);
  CHECK_THROWS_AS(make_indicator_train(GapLaw::squares().max_index + 1), InvalidInput);
  auto law = GapLaw::arithmetic(3.0);
  law.first_index = 1;
  CHECK_THROWS_AS(make_indicator_train(0, law), InvalidInput);
  CHECK(make_indicator_train(2, law).line_integral() == doctest::Approx(2.0));
}

TEST_CASE("validate_nonincreasing") {
  CHECK(validate_nonincreasing(chi01()).ok);
  CHECK(validate_nonincreasing(PiecewisePowerFn({0.0, 1.0}, {PowerPiece{1.0, 0.5}})).ok);
  const auto bad = validate_nonincreasing(make_indicator_train(2));
  CHECK_FALSE(bad.ok);
  CHECK(bad.location == 4.0);
  CHECK_FALSE(bad.reason.empty());
  CHECK_FALSE(validate_nonincreasing(PiecewisePowerFn::block(1.0, 2.0)).ok);
  CHECK(validate_nonincreasing(PiecewisePowerFn()).ok);
  CHECK_THROWS_AS(RadialProfile(make_indicator_train(2), 1), InvalidInput);
}

TEST_CASE("construction rejects invalid data") {
  CHECK_THROWS_AS(PiecewisePowerFn({1.0, 0.5}, {PowerPiece{1.0, 0.0}}), InvalidInput);
  CHECK_THROWS_AS(PiecewisePowerFn({0.0, 1.0}, {PowerPiece{-1.0, 0.0}}), InvalidInput);
  CHECK_THROWS_AS(PiecewisePowerFn({0.0, 1.0, 2.0}, {PowerPiece{1.0, 0.0}}), InvalidInput);
  CHECK_THROWS_AS(PiecewisePowerFn({-1.0, 1.0}, {PowerPiece{1.0, 0.5}}), InvalidInput);
  CHECK_THROWS_AS(RadialProfile(PiecewisePowerFn::power_law(1.0, 1.0), 1), InvalidInput);
  CHECK_NOTHROW(RadialProfile(PiecewisePowerFn::power_law(1.0, 1.0), 2));
  CHECK_THROWS_AS(moment_integral(PiecewisePowerFn({0.0, 1.0}, {PowerPiece{1.0, 1.5}}), 0.5, 1),
                  NonIntegrable);
}

TEST_CASE("canonical form merges and trims") {
  const PiecewisePowerFn f({0.0, 1.0, 2.0, 3.0, 4.0},
                           {PowerPiece{0.0, 0.7}, PowerPiece{2.0, 0.0}, PowerPiece{2.0, 0.0},
                            PowerPiece{0.0, 0.0}});
  const auto c = f.canonical();
  CHECK(std::vector<double>(c.breakpoints().begin(), c.breakpoints().end()) ==
        std::vector<double>{1.0, 3.0});
  for (double x : {0.5, 1.0, 1.5, 2.5, 3.5, 5.0}) CHECK(c(x) == f(x));
  CHECK(PiecewisePowerFn({0.0, 1.0}, {PowerPiece{0.0, 0.0}}).canonical().is_zero());
}

TEST_CASE("moment integral examples") {
  CHECK(moment_integral(chi01(), 0.5, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(moment_integral(make_indicator_train(3), 9.5, 1) == doctest::Approx(3.5).epsilon(1e-15));
  CHECK(moment_integral(PiecewisePowerFn(), 3.0, 2) == 0.0);
  for (int n : {1, 2, 3}) {
    for (double lambda : {0.25, 0.5, 0.5 * n}) {
      const auto f = PiecewisePowerFn::power_law(1.0, lambda);
      for (double x : {0.01, 0.3, 1.0, 7.0}) {
        const double want = std::pow(x, n - lambda) / (n - lambda);
        CHECK(oracle::rel_err(moment_integral(f, x, n), want) < 1e-14);
        CHECK(oracle::rel_err(oracle::moment(f, x, n), want) < 1e-10);
      }
    }
  }
}

TEST_CASE("log moment integral examples") {
  CHECK(log_moment_integral(chi01(), 1.0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(log_moment_integral(PiecewisePowerFn(), 2.0, 1) == 0.0);
  for (int n : {1, 2, 3}) {
    for (double lambda : {0.25, 0.5, 0.5 * n}) {
      const auto f = PiecewisePowerFn::power_law(1.0, lambda);
      for (double x : {0.01, 0.3, 1.0, 7.0}) {
        const double e = n - lambda;
        const double want = std::pow(x, e) / (e * e);
        CHECK(oracle::rel_err(log_moment_integral(f, x, n), want) < 1e-13);
        CHECK(oracle::rel_err(oracle::log_moment(f, x, n), want) < 1e-9);
      }
    }
  }
}

TEST_CASE("moment integrals against quadrature on random power profiles") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + trial % 3;
    const auto f = random_power_profile(rng, n);
    for (int k = 0; k < 4; ++k) {
      const double x = 0.05 + 12.0 * u(rng);
      CHECK(oracle::rel_err(moment_integral(f, x, n), oracle::moment(f, x, n)) < 1e-10);
      CHECK(oracle::rel_err(log_moment_integral(f, x, n), oracle::log_moment(f, x, n)) < 1e-9);
    }
  }
}

TEST_CASE("log moment equals the integral of moment(t)/t") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  boost::math::quadrature::tanh_sinh<double> ts;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 3;
    const auto f = random_power_profile(rng, n);
    const double x = 0.1 + 10.0 * u(rng);
    double fubini = 0.0;
    std::vector<double> cuts{0.0};
    for (double b : f.breakpoints()) {
      if (b > 0.0 && b < x) cuts.push_back(b);
    }
    cuts.push_back(x);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      fubini += ts.integrate([&](double t) { return moment_integral(f, t, n) / t; }, cuts[i],
                             cuts[i + 1]);
    }
    CHECK(oracle::rel_err(log_moment_integral(f, x, n), fubini) < 1e-10);
  }
}

TEST_CASE("moment integrals are non-decreasing and split-invariant") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 3;
    const auto f = random_power_profile(rng, n);
    double prev_i = 0.0;
    double prev_j = 0.0;
    for (double x = 0.05; x < 20.0; x *= 1.17) {
      const double I = moment_integral(f, x, n);
      const double J = log_moment_integral(f, x, n);
      CHECK(I >= prev_i);
      CHECK(J >= prev_j);
      prev_i = I;
      prev_j = J;
    }
    const double cut = 0.2 + 5.0 * u(rng);
    const auto g = f.split_at(cut);
    CHECK(g.segment_count() == f.segment_count() + 1);
    for (double x : {0.3, 1.7, 4.2, 9.0}) {
      CHECK(oracle::rel_err(moment_integral(g, x, n), moment_integral(f, x, n)) < 1e-14);
      CHECK(oracle::rel_err(log_moment_integral(g, x, n), log_moment_integral(f, x, n)) < 1e-14);
    }
  }
}

TEST_CASE("moment integral against a 1e6-node trapezoid on 100 step profiles") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto f = random_step_profile(seed, 20);
    const int n = 1 + static_cast<int>(seed % 3);
    const double x = 0.5 * f.breakpoints().back() + 0.01;
    CHECK(oracle::rel_err(moment_integral(f, x, n), oracle::trapezoid_moment(f, x, n, 1'000'000)) <
          1e-6);
  }
}

TEST_CASE("random step profiles are decreasing") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto f = random_step_profile(seed, 100);
    CHECK(validate_nonincreasing(f).ok);
    CHECK(f.breakpoints().front() == 0.0);
    CHECK(f.breakpoints().back() <= 100.0);
    CHECK(f.has_compact_support());
  }
  CHECK(random_step_profile(3, 10) == random_step_profile(3, 10));
}

TEST_CASE("transforms") {
  const auto f = PiecewisePowerFn({0.0, 1.0, 3.0}, {PowerPiece{3.0, 0.0}, PowerPiece{1.0, 0.0}});
  const auto d = f.dilated(2.0);
  for (double x : {0.1, 0.6, 1.2, 2.0}) CHECK(d(x) == f(2.0 * x));
  const auto e = f.even_extension();
  for (double x : {0.1, 0.6, 1.2, 2.0, 4.0}) {
    CHECK(e(x) == f(x));
    CHECK(e(-x) == f(x));
  }
  CHECK(e.line_integral() == doctest::Approx(2.0 * f.line_integral()));
  CHECK_FALSE(std::signbit(e.breakpoints()[e.breakpoints().size() / 2]));
  const auto sq = f.powered(2.0);
  CHECK(sq(0.5) == 9.0);
  CHECK(f.scaled(5.0)(2.0) == 5.0);
}

TEST_CASE("unit ball volume") {
  CHECK(unit_ball_volume(1) == doctest::Approx(2.0));
  CHECK(unit_ball_volume(2) == doctest::Approx(std::numbers::pi));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * std::numbers::pi / 3.0));
  const auto p = MorreyParams::make(2.0, 1.5, 3);
  CHECK(p.unit_ball_volume == doctest::Approx(4.0 * std::numbers::pi / 3.0));
  CHECK_THROWS_AS(MorreyParams::make(0.5, 0.5, 1), InvalidInput);
  CHECK_THROWS_AS(MorreyParams::make(1.0, 1.5, 1), InvalidInput);
  CHECK_THROWS_AS(MorreyParams::make(1.0, -0.1, 1), InvalidInput);
}

TEST_CASE("function spec JSON") {
  const auto doc = nlohmann::json::parse(
      R"({"breakpoints": [0, 1, 4], "pieces": [{"c": 2, "beta": 0.5}, {"c": 1}]})");
  const auto f = parse_function_spec(doc);
  CHECK(f(0.25) == doctest::Approx(4.0));
  CHECK(f(2.0) == 1.0);
  CHECK(f(5.0) == 0.0);
  CHECK(parse_function_spec(to_json(f)) == f);

  const auto with_tail = parse_function_spec(
      nlohmann::json::parse(R"({"breakpoints": [0], "pieces": [{"c": 1, "beta": 0.5}]})"));
  CHECK(with_tail == PiecewisePowerFn::power_law(1.0, 0.5));

  auto path_of = [](const char* text) -> std::string {
    try {
      parse_function_spec(nlohmann::json::parse(text));
    } catch (const SpecError& e) {
      return e.path();
    }
    return "<accepted>";
  };
  CHECK(path_of(R"({"breakpoints": [0, 2, 1], "pieces": [{"c": 1}, {"c": 1}]})") == "/breakpoints/2");
  CHECK(path_of(R"({"breakpoints": [0, 1], "pieces": [{"c": -1}]})") == "/pieces/0/c");
  CHECK(path_of(R"({"breakpoints": [0, 1], "pieces": [{"c": 1, "beta": "x"}]})") ==
        "/pieces/0/beta");
  CHECK(path_of(R"({"breakpoints": [0, 1], "pieces": [{"beta": 0}]})") == "/pieces/0/c");
  CHECK(path_of(R"({"breakpoints": [0, 1]})") == "/pieces");
  CHECK(path_of(R"({"breakpoints": [0, 1], "pieces": [{"c": 1}], "colour": 1})") == "/colour");
  CHECK(path_of(R"({"breakpoints": [0, 1], "pieces": [{"c": 1}, {"c": 1, "beta": 0}]})") ==
        "<accepted>");
}

TEST_CASE("builtin function names") {
  CHECK(resolve_function("train:K=3") == make_indicator_train(3));
  CHECK(resolve_function("power:beta=0.5") == PiecewisePowerFn::power_law(1.0, 0.5));
  CHECK(resolve_function("power:beta=0.5,c=2")(1.0) == 2.0);
  CHECK(resolve_function("block:a=0,b=1") == chi01());
  CHECK(resolve_function("zero").is_zero());
  CHECK(resolve_function("steps:seed=4,count=7") == random_step_profile(4, 7));
  CHECK_THROWS_AS(resolve_function("train"), SpecError);
  CHECK_THROWS_AS(resolve_function("train:K=x"), SpecError);
  CHECK_THROWS_AS(resolve_function("block:a=0,b=1,d=3"), SpecError);
  CHECK_THROWS_AS(resolve_function("nosuch:x=1"), SpecError);
  CHECK_THROWS_AS(resolve_function("/nonexistent/spec.json"), InvalidInput);
}
