#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "zalms/filters.hpp"
#include "zalms/metrics.hpp"
#include "zalms/rng.hpp"
#include "zalms/signals.hpp"

using namespace zalms;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Steps two parameterizations over the same random data and requires
// bit-identical coefficient trajectories.
void require_identical_trajectories(const AlgorithmParams& pa,
                                    const AlgorithmParams& pb,
                                    std::uint64_t seed, std::size_t L,
                                    std::size_t steps) {
  Rng rng(seed);
  FilterState sa = init_state(L);
  FilterState sb = init_state(L);
  for (std::size_t k = 0; k < steps; ++k) {
    const double x = rng.gaussian();
    const double d = rng.gaussian();
    const StepOutput oa = step(sa, pa, x, d);
    const StepOutput ob = step(sb, pb, x, d);
    REQUIRE(oa.error == ob.error);
    REQUIRE(sa.w == sb.w);
  }
}

}  // namespace

TEST_CASE("partial_sign window semantics") {
  CHECK(partial_sign(0.5, 0.01, 0.8) == 1);
  CHECK(partial_sign(-2.0, 0.01, 0.8) == 0);
  CHECK(partial_sign(0.005, 0.01, 0.8) == 0);
  CHECK(partial_sign(0.01, 0.01, 0.8) == 0);   // lower bound excluded
  CHECK(partial_sign(0.8, 0.01, 0.8) == 1);    // upper bound included
  CHECK(partial_sign(-0.8, 0.01, 0.8) == -1);
  CHECK(partial_sign(0.0, 0.0, kInf) == 0);
  CHECK(partial_sign(-3.5, 0.0, kInf) == -1);
  CHECK(partial_sign(3.5, 0.0, kInf) == 1);
  CHECK_THROWS_AS(partial_sign(1.0, 0.8, 0.8), std::invalid_argument);
  CHECK_THROWS_AS(partial_sign(1.0, -0.1, 0.8), std::invalid_argument);
}

TEST_CASE("init_state") {
  const FilterState s3 = init_state(3);
  CHECK(s3.w == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(s3.n == 0);
  CHECK(s3.xpow == 0.0);

  const FilterState s2 = init_state(2, std::vector<double>{1.0, -1.0});
  CHECK(s2.w == std::vector<double>{1.0, -1.0});

  CHECK_THROWS_AS(init_state(0), std::invalid_argument);
  CHECK_THROWS_AS(init_state(2, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("step: dwza-lms hand arithmetic") {
  // Prime the window to [1, -1] with a no-op step (d chosen so e = 0).
  FilterState st = init_state(2, std::vector<double>{0.5, 0.0});
  const AlgorithmParams p = DwzaLms{0.1, 0.01, 0.01, 0.8};
  const StepOutput warm = step(st, p, -1.0, -0.5);
  CHECK(warm.error == 0.0);
  CHECK(st.w == std::vector<double>{0.5, 0.0});

  const StepOutput out = step(st, p, 1.0, 1.0);
  CHECK(out.y == doctest::Approx(0.5));
  CHECK(out.error == doctest::Approx(0.5));
  CHECK(out.attracted_count == 1);  // only w0 = 0.5 lies in (0.01, 0.8]
  CHECK(st.w[0] == doctest::Approx(0.545).epsilon(1e-15));
  CHECK(st.w[1] == doctest::Approx(-0.05).epsilon(1e-15));
}

TEST_CASE("step: dwza-lms with zero input leaves only the attraction term") {
  FilterState st = init_state(1, std::vector<double>{0.5});
  const AlgorithmParams p = DwzaLms{0.1, 0.01, 0.01, 0.8};
  const StepOutput out = step(st, p, 0.0, 1.0);
  CHECK(out.error == doctest::Approx(1.0));
  CHECK(st.w[0] == doctest::Approx(0.49).epsilon(1e-15));
}

TEST_CASE("step: error field is exactly d - y") {
  Rng rng(5);
  FilterState st = init_state(4);
  const AlgorithmParams p = Lms{0.05};
  for (int i = 0; i < 50; ++i) {
    const double x = rng.gaussian();
    const double d = rng.gaussian();
    // y must be the dot product of the pre-update w with the shifted window.
    std::vector<double> w_before = st.w;
    std::vector<double> win(4, 0.0);
    win[0] = x;
    for (int j = 1; j < 4; ++j) {
      win[j] = (st.n >= static_cast<std::uint64_t>(j))
                   ? st.hist[st.pos + j - 1]
                   : 0.0;
    }
    double y = 0.0;
    for (int j = 0; j < 4; ++j) y += w_before[j] * win[j];
    const StepOutput out = step(st, p, x, d);
    CHECK(out.y == doctest::Approx(y).epsilon(1e-14));
    CHECK(out.error == d - out.y);
  }
}

TEST_CASE("reduction identities are bit-exact over 1000 random steps") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    require_identical_trajectories(DwzaLms{0.05, 0.0, 0.01, 0.8}, Lms{0.05},
                                   seed, 8, 1000);
    require_identical_trajectories(DwzaNlms{1.0, 0.0, 0.01, 0.8, 1e-6},
                                   Nlms{1.0, 1e-6}, seed, 8, 1000);
    require_identical_trajectories(WzaLms{0.05, 3e-3, 0.0, kInf},
                                   ZaLms{0.05, 3e-3}, seed, 8, 1000);
    require_identical_trajectories(DwzaLms{0.05, 3e-3, 0.0, kInf},
                                   DzaLms{0.05, 3e-3}, seed, 8, 1000);
  }
}

TEST_CASE("za-lms update is the negative subgradient step of 0.5 e^2 + eta |w|_1") {
  const double mu = 0.05;
  const double rho = 2e-3;
  const double eta = rho / mu;
  Rng rng(17);
  const std::size_t L = 6;

  for (int rep = 0; rep < 20; ++rep) {
    // A state with general coefficients and a filled window.
    FilterState st = init_state(L);
    const AlgorithmParams warm = Lms{0.08};
    for (int k = 0; k < 24; ++k) step(st, warm, rng.gaussian(), rng.gaussian());
    const std::vector<double> w0 = st.w;
    const std::vector<double> win(st.window().begin(), st.window().end());

    // One more sample: record the ZA-LMS step taken from (w0, win', d).
    const double x_new = rng.gaussian();
    const double d = rng.gaussian();
    FilterState za = st;
    step(za, AlgorithmParams(ZaLms{mu, rho}), x_new, d);

    std::vector<double> win2(L);
    win2[0] = x_new;
    for (std::size_t j = 1; j < L; ++j) win2[j] = win[j - 1];

    auto cost = [&](const std::vector<double>& w) {
      double y = 0.0;
      for (std::size_t j = 0; j < L; ++j) y += w[j] * win2[j];
      const double e = d - y;
      double l1 = 0.0;
      for (double v : w) l1 += std::fabs(v);
      return 0.5 * e * e + eta * l1;
    };

    for (std::size_t i = 0; i < L; ++i) {
      if (std::fabs(w0[i]) <= 1e-6) continue;
      const double h = 1e-7;
      std::vector<double> wp = w0, wm = w0;
      wp[i] += h;
      wm[i] -= h;
      const double grad = (cost(wp) - cost(wm)) / (2.0 * h);
      const double delta = za.w[i] - w0[i];
      // delta must equal -mu * grad.
      CHECK(std::fabs(delta + mu * grad) <=
            1e-6 * std::max(std::fabs(delta), 1e-9));
    }
  }
}

TEST_CASE("attractor touches only in-window taps, cost structure matches") {
  Rng rng(23);
  const std::size_t L = 32;
  const AlgorithmParams dwza = DwzaNlms{1.0, 0.05, 0.05, 0.8, 1e-6};

  FilterState st = init_state(L);
  // Mix of magnitudes: below a, inside the window, above b.
  for (std::size_t i = 0; i < L; ++i) {
    const double m = (i % 3 == 0) ? 0.01 : (i % 3 == 1) ? 0.3 : 2.0;
    st.w[i] = (i % 2) ? m : -m;
  }
  std::size_t in_window = 0;
  for (double w : st.w) {
    const double m = std::fabs(w);
    if (m > 0.05 && m <= 0.8) ++in_window;
  }

  for (int k = 0; k < 200; ++k) {
    // Window membership of the pre-update coefficients.
    std::size_t expect = 0;
    for (double w : st.w) {
      const double m = std::fabs(w);
      if (m > 0.05 && m <= 0.8) ++expect;
    }
    StepCounts counts;
    const StepOutput out =
        step_counted(st, dwza, rng.gaussian(), 0.3 * rng.gaussian(), counts);
    CHECK(out.attracted_count == expect);
    CHECK(counts.conv_mul == L);
    CHECK(counts.update_mul == L);             // one multiply per tap
    CHECK(counts.attractor_madd == expect);    // plus one add per attracted tap
    CHECK(counts.window_pairs == L);           // one comparison pair per tap
    CHECK(counts.abs_e == 1);                  // exactly one |e| per step
  }
  (void)in_window;
}

TEST_CASE("out-of-window taps move exactly by the gradient term") {
  // With every |w_i| outside (a, b], one DWZA-LMS step equals one LMS step.
  Rng rng(29);
  const std::size_t L = 10;
  FilterState a = init_state(L);
  FilterState b = init_state(L);
  for (std::size_t i = 0; i < L; ++i) {
    const double m = (i % 2) ? 0.001 : 3.0;  // below a / above b
    a.w[i] = b.w[i] = (i % 3) ? m : -m;
  }
  const double x = rng.gaussian();
  const double d = rng.gaussian();
  step(a, AlgorithmParams(DwzaLms{0.05, 0.9, 0.01, 0.8}), x, d);
  step(b, AlgorithmParams(Lms{0.05}), x, d);
  CHECK(a.w == b.w);
}

TEST_CASE("step: divergence poisons the state") {
  FilterState st = init_state(2);
  const AlgorithmParams p = Lms{0.1};
  CHECK_THROWS_AS(step(st, p, std::numeric_limits<double>::quiet_NaN(), 0.0),
                  divergence_error);
  CHECK(st.poisoned);
  CHECK_THROWS_AS(step(st, p, 0.0, 0.0), divergence_error);

  FilterState st2 = init_state(2);
  CHECK_THROWS_AS(step(st2, p, 1.0, kInf), divergence_error);
  CHECK(st2.poisoned);

  // Overflowing coefficients surface as divergence on a later step.
  FilterState st3 = init_state(1);
  const AlgorithmParams big = Lms{1e300};
  bool threw = false;
  try {
    for (int i = 0; i < 10; ++i) step(st3, big, 1e10, 1e10);
  } catch (const divergence_error&) {
    threw = true;
  }
  CHECK(threw);
  CHECK(st3.poisoned);
}

TEST_CASE("run: trace lengths, determinism, empty input") {
  const auto h = std::vector<double>{0.3, -0.2, 0.1};
  InputSpec is;
  is.seed = 101;
  const auto x = gen_input(is, 10);
  SystemModel hm;
  hm.taps = h;
  const auto d = desired_output(hm, x, std::vector<double>(10, 0.0));

  FilterState st = init_state(3);
  const AlgorithmParams p = Lms{0.05};
  const RunTrace tr = run(st, p, x, d, h, 1);
  CHECK(tr.msd.size() == 10);
  CHECK(tr.err2.size() == 10);
  CHECK(tr.steps == 10);

  FilterState st2 = init_state(3);
  const RunTrace tr2 = run(st2, p, x, d, h, 1);
  CHECK(tr.msd == tr2.msd);
  CHECK(tr.consumed_hash == tr2.consumed_hash);

  FilterState st3 = init_state(3);
  const RunTrace tr3 =
      run(st3, p, std::span<const double>(), std::span<const double>(), h, 1);
  CHECK(tr3.msd.empty());
  CHECK(tr3.steps == 0);

  FilterState st4 = init_state(3);
  const RunTrace tr4 = run(st4, p, x, d, h, 4);
  CHECK(tr4.msd.size() == 2);  // records after steps 4 and 8

  FilterState st5 = init_state(3);
  CHECK_THROWS_AS(run(st5, p, x, d, h, 0), std::invalid_argument);
  CHECK_THROWS_AS(run(st5, p, x, std::span<const double>(d).subspan(1), h, 1),
                  std::invalid_argument);
}

TEST_CASE("run: LMS on a one-tap system learns (Monte Carlo)") {
  int improved = 0;
  const std::vector<double> h{1.0};
  for (int s = 0; s < 100; ++s) {
    InputSpec is;
    is.seed = 1000 + s;
    const auto x = gen_input(is, 200);
    SystemModel hm;
    hm.taps = h;
    const auto d = desired_output(hm, x, std::vector<double>(200, 0.0));
    FilterState st = init_state(1);
    const RunTrace tr = run(st, AlgorithmParams(Lms{0.1}), x, d, h, 1);
    if (tr.msd.back() < tr.msd.front()) ++improved;
  }
  CHECK(improved >= 95);
}
