#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "zalms/theory.hpp"

using namespace zalms;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
}  // namespace

TEST_CASE("stability bound") {
  CHECK(stability_bound(100, 1.0) == doctest::Approx(2.0 / 102.0).epsilon(1e-15));
  CHECK(stability_bound(1, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(stability_bound(100, 4.0) == doctest::Approx(1.0 / 204.0).epsilon(1e-15));
  CHECK_THROWS_AS(stability_bound(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(stability_bound(10, 0.0), std::invalid_argument);
}

TEST_CASE("attraction probability: anchors and Gaussian special case") {
  const GgdParams g2{0.0, 1.0, 2.0};
  CHECK(attraction_probability(0.0, kInf, g2) == doctest::Approx(1.0).epsilon(1e-12));
  // Shrinking window: probability collapses.
  CHECK(attraction_probability(0.5, 0.5 + 1e-12, g2) ==
        doctest::Approx(0.0).epsilon(1e-9));
  // Gaussian case: 2 (Phi(0.8) - Phi(0.01)) = 0.5683104902039435 (erf oracle).
  const double expect = 2.0 * (normal_cdf(0.8) - normal_cdf(0.01));
  CHECK(attraction_probability(0.01, 0.8, g2) ==
        doctest::Approx(expect).epsilon(1e-10));
  CHECK(attraction_probability(0.01, 0.8, g2) ==
        doctest::Approx(0.5683104902039435).epsilon(1e-10));
  // Experiment-6 operating point (scipy reference).
  CHECK(attraction_probability(0.01, 0.8, GgdParams{0.0, 1.0, 0.1}) ==
        doctest::Approx(0.2527420397441863).epsilon(1e-9));

  CHECK_THROWS_AS(attraction_probability(0.01, 0.8, GgdParams{0.5, 1.0, 2.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(attraction_probability(0.8, 0.8, g2), std::invalid_argument);
}

TEST_CASE("attraction probability is monotone under window widening") {
  const GgdParams g{0.0, 1.0, 0.5};
  double prev = 0.0;
  for (double b = 0.05; b < 3.0; b += 0.05) {
    const double p = attraction_probability(0.02, b, g);
    CHECK(p >= prev);
    prev = p;
  }
  prev = attraction_probability(1.0, 2.0, g);
  for (double a = 0.9; a >= 0.0; a -= 0.1) {
    const double p = attraction_probability(a, 2.0, g);
    CHECK(p >= prev);
    prev = p;
  }
}

TEST_CASE("lms_mse: values and limits") {
  CHECK(lms_mse(0.01, 100, 1.0, 1e-4) ==
        doctest::Approx(2.0204081632653063e-4).epsilon(1e-12));
  // Equivalent closed form (2 - 2 mu sx2) sv2 / (2 - mu sx2 (L+2)).
  CHECK(lms_mse(0.01, 100, 1.0, 1e-4) ==
        doctest::Approx((2.0 - 0.02) * 1e-4 / (2.0 - 1.02)).epsilon(1e-12));
  // Vanishing-step limit -> sigma_v^2.
  CHECK(lms_mse(1e-9, 100, 1.0, 1e-4) == doctest::Approx(1e-4).epsilon(1e-6));
  CHECK(lms_mse(0.01, 100, 1.0, 0.0) == 0.0);
  CHECK_THROWS_AS(lms_mse(0.02, 100, 1.0, 1e-4), theory_out_of_range);
  CHECK_THROWS_AS(lms_mse(0.0, 100, 1.0, 1e-4), theory_out_of_range);
}

TEST_CASE("steady_state_mse: rho = 0 collapses to lms_mse bit-exactly") {
  TheoryInputs t;
  t.mu = 0.01;
  t.rho = 0.0;
  t.a = 0.01;
  t.b = 0.8;
  t.L = 100;
  t.sigma_x2 = 1.0;
  t.sigma_v2 = 1e-4;
  t.ggd = GgdParams{0.0, 1.0, 0.1};
  const auto p = steady_state_mse(t);
  CHECK(p.mse == lms_mse(0.01, 100, 1.0, 1e-4));  // bit-level
  CHECK(p.mse == p.mse_lms);
  CHECK(p.regime_ok);
  CHECK(p.mu_max == doctest::Approx(2.0 / 102.0));

  // Noiseless steady state is zero.
  t.sigma_v2 = 0.0;
  CHECK(steady_state_mse(t).mse == 0.0);
}

TEST_CASE("steady_state_mse at the mu=0.01, rho=2e-4, beta=0.1 operating point") {
  // Direct evaluation of the closed form with P_A = 0.2527420397441863
  // (scipy): the attraction term is 2.01e-4 against mu*A = 9.8e-3, so the
  // MSE sits 2.1% above the LMS value and the factor-100 dominance test
  // fails.  (Stated here from the oracle computation; the ratio is small
  // but not below 1%.)
  TheoryInputs t;
  t.mu = 0.01;
  t.rho = 2e-4;
  t.a = 0.01;
  t.b = 0.8;
  t.L = 100;
  t.sigma_x2 = 1.0;
  t.sigma_v2 = 1e-4;
  t.ggd = GgdParams{0.0, 1.0, 0.1};
  const auto p = steady_state_mse(t);
  CHECK(p.mse == doctest::Approx(2.0627541191966202e-4).epsilon(1e-9));
  CHECK(p.mse / p.mse_lms == doctest::Approx(1.0209591095013573).epsilon(1e-9));
  CHECK_FALSE(p.regime_ok);
  CHECK(p.excess_msd == doctest::Approx((p.mse - 1e-4) / 1.0).epsilon(1e-12));

  // At rho an order of magnitude smaller the dominance condition holds.
  t.rho = 2e-5;
  CHECK(steady_state_mse(t).regime_ok);
}

TEST_CASE("steady_state_mse: strictly increasing in rho, above sigma_v2") {
  TheoryInputs t;
  t.mu = 0.01;
  t.a = 0.01;
  t.b = 0.8;
  t.L = 100;
  t.sigma_x2 = 1.0;
  t.sigma_v2 = 1e-4;
  t.ggd = GgdParams{0.0, 1.0, 0.1};
  double prev = 0.0;
  for (double rho = 0.0; rho <= 1.05e-3; rho += 5e-5) {
    t.rho = rho;
    const auto p = steady_state_mse(t);
    CHECK(p.mse > (rho == 0.0 ? 0.0 : prev));
    CHECK(p.mse >= t.sigma_v2);
    CHECK(p.excess_msd >= 0.0);
    prev = p.mse;
  }
}

TEST_CASE("steady_state_mse: out-of-range errors") {
  TheoryInputs t;
  t.mu = 0.03;  // above 2/102
  t.rho = 0.0;
  t.a = 0.01;
  t.b = 0.8;
  t.L = 100;
  t.sigma_x2 = 1.0;
  t.sigma_v2 = 1e-4;
  t.ggd = GgdParams{0.0, 1.0, 0.1};
  CHECK_THROWS_AS(steady_state_mse(t), theory_out_of_range);

  // Large rho drives the denominator nonpositive: the formula predicts
  // divergence.
  t.mu = 2e-4;
  t.rho = 2e-4;
  CHECK_THROWS_AS(steady_state_mse(t), theory_out_of_range);
}
