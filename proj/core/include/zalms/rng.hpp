#ifndef ZALMS_RNG_HPP
#define ZALMS_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace zalms {

// All randomness in the library flows through this one generator so that
// results are bit-reproducible across runs and platforms:
//
//   * engine: xoshiro256++ (Blackman & Vigna), state seeded by four
//     successive outputs of the splitmix64 sequence started at `seed`;
//   * uniforms: 53-bit mantissa draws, uniform() in [0,1) and
//     uniform_pos() in (0,1];
//   * gaussians: Box-Muller transform (trigonometric form), one cached
//     spare per pair;
//   * gamma variates: Marsaglia-Tsang squeeze method, with the
//     G(a) = G(a+1) * U^(1/a) boost for shape < 1.
//
// No global state anywhere; distinct Rng instances never share anything.

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// splitmix64 finalizer, used as the mixing stage of derive_seed.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic seed schedule for independent streams: the fields are
/// absorbed sequentially with a full avalanche mix between each, so
/// (stream, index) pairs never collide by construction accidents.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                                 std::uint64_t index, std::uint64_t sub = 0) {
  std::uint64_t h = mix64(base + 0x9e3779b97f4a7c15ULL);
  h = mix64(h ^ (stream + 0x9e3779b97f4a7c15ULL));
  h = mix64(h ^ (index + 0xbf58476d1ce4e5b9ULL));
  h = mix64(h ^ (sub + 0x94d049bb133111ebULL));
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64_next(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform in [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1]; safe as a log() argument.
  double uniform_pos() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Unbiased uniform integer in [0, n), rejection on the top range.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below requires n > 0");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % n;
  }

  /// Standard normal draw via Box-Muller; pairs are generated together and
  /// the second value cached.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * M_PI * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

  /// Gamma(shape, 1) via Marsaglia-Tsang.  Valid for any shape > 0.
  double gamma(double shape) {
    if (!(shape > 0.0)) throw std::invalid_argument("gamma shape must be > 0");
    if (shape < 1.0) {
      const double u = uniform_pos();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x;
      double v;
      do {
        x = gaussian();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_pos();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace zalms

#endif  // ZALMS_RNG_HPP
