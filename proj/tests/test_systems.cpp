#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "zalms/systems.hpp"

using namespace zalms;

TEST_CASE("gen_exact_sparse: support size and determinism") {
  const auto m = gen_exact_sparse(7, 100, 8, 1.0);
  CHECK(m.taps.size() == 100);
  std::size_t nonzero = 0;
  for (double t : m.taps) {
    if (t != 0.0) ++nonzero;
  }
  CHECK(nonzero == 8);
  const auto m2 = gen_exact_sparse(7, 100, 8, 1.0);
  CHECK(m.taps == m2.taps);
  const auto m3 = gen_exact_sparse(8, 100, 8, 1.0);
  CHECK(m.taps != m3.taps);

  // Fully dense limit: no zero taps.
  const auto dense = gen_exact_sparse(3, 5, 5, 1.0);
  for (double t : dense.taps) CHECK(t != 0.0);

  CHECK_THROWS_AS(gen_exact_sparse(1, 5, 6, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(gen_exact_sparse(1, 5, 0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(gen_exact_sparse(1, 0, 0, 1.0), std::invalid_argument);
}

TEST_CASE("gen_exact_sparse: positions look uniform") {
  // Count position occupancy over many seeds; each of L slots should be hit
  // roughly K/L of the time.
  const std::size_t L = 20, K = 4;
  std::vector<int> hits(L, 0);
  const int reps = 4000;
  for (int s = 0; s < reps; ++s) {
    const auto m = gen_exact_sparse(1000 + s, L, K, 1.0);
    for (std::size_t i = 0; i < L; ++i) {
      if (m.taps[i] != 0.0) ++hits[i];
    }
  }
  const double expect = static_cast<double>(reps) * K / L;
  for (std::size_t i = 0; i < L; ++i) {
    CHECK(std::fabs(hits[i] - expect) < 5.0 * std::sqrt(expect));
  }
}

TEST_CASE("gen_noisy_sparse: floor variance and vanishing-noise limit") {
  const auto noisy = gen_noisy_sparse(11, 100, 8, 1.0, 1e-4);
  CHECK(noisy.taps.size() == 100);
  for (double t : noisy.taps) CHECK(t != 0.0);

  // The 92 small taps carry the floor variance (within a chi-square-ish
  // factor 1.5 band).
  const auto exact = gen_exact_sparse(11, 100, 8, 1.0);
  double var = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    if (exact.taps[i] == 0.0) {
      var += noisy.taps[i] * noisy.taps[i];
      ++count;
    }
  }
  var /= count;
  CHECK(count == 92);
  CHECK(var > 1e-4 / 1.5);
  CHECK(var < 1e-4 * 1.5);

  // floor_var -> 0 recovers the exact-sparse model tap for tap.
  const auto tiny = gen_noisy_sparse(11, 100, 8, 1.0, 1e-30);
  for (std::size_t i = 0; i < 100; ++i) {
    CHECK(std::fabs(tiny.taps[i] - exact.taps[i]) < 1e-14);
  }

  CHECK_THROWS_AS(gen_noisy_sparse(1, 10, 2, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("gen_ggd_system and gen_gaussian_system") {
  const GgdParams g{0.0, 1.0, 0.05};
  const auto m = gen_ggd_system(5, 100, g);
  CHECK(m.family == SystemFamily::GgdNearSparse);
  CHECK(m.taps.size() == 100);
  CHECK(m.taps == gen_ggd_system(5, 100, g).taps);
  CHECK(m.taps == sample_ggd(5, 100, g));

  const auto gm = gen_gaussian_system(5, 50, 1.0);
  CHECK(gm.family == SystemFamily::GaussianNonSparse);
  CHECK(gm.taps.size() == 50);
  CHECK_THROWS_AS(gen_ggd_system(5, 0, g), std::invalid_argument);
}

TEST_CASE("generate_system dispatches on the spec family") {
  SystemSpec spec;
  spec.family = SystemFamily::NoisySparse;
  spec.L = 64;
  spec.K = 4;
  spec.amp_sigma = 2.0;
  spec.floor_var = 1e-6;
  const auto m = generate_system(spec, 17);
  CHECK(m.family == SystemFamily::NoisySparse);
  CHECK(m.taps == gen_noisy_sparse(17, 64, 4, 2.0, 1e-6).taps);
}

TEST_CASE("system csv round-trip is exact") {
  for (const SystemModel& m :
       {gen_exact_sparse(13, 32, 5, 0.7), gen_noisy_sparse(14, 32, 5, 0.7, 1e-4),
        gen_ggd_system(15, 32, GgdParams{0.0, 1.0, 0.1}),
        gen_gaussian_system(16, 32, 1.5)}) {
    std::stringstream ss;
    write_system_csv(ss, m);
    const SystemModel back = read_system_csv(ss);
    CHECK(back.family == m.family);
    CHECK(back.seed == m.seed);
    REQUIRE(back.taps.size() == m.taps.size());
    for (std::size_t i = 0; i < m.taps.size(); ++i) {
      CHECK(back.taps[i] == m.taps[i]);  // bit-exact
    }
    REQUIRE(back.params.size() == m.params.size());
    for (std::size_t i = 0; i < m.params.size(); ++i) {
      CHECK(back.params[i].first == m.params[i].first);
      CHECK(back.params[i].second == m.params[i].second);
    }
  }
}

TEST_CASE("system csv rejects malformed input") {
  std::stringstream empty("");
  CHECK_THROWS(read_system_csv(empty));
  std::stringstream nohdr("0.5\n0.25\n");
  CHECK_THROWS(read_system_csv(nohdr));
  std::stringstream short_file("# family=ggd L=3 seed=1 mean=0 sigma_g=1 beta=1\n0.5\n");
  CHECK_THROWS(read_system_csv(short_file));
}
