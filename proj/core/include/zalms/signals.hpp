#ifndef ZALMS_SIGNALS_HPP
#define ZALMS_SIGNALS_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "zalms/systems.hpp"

namespace zalms {

enum class InputKind { WhiteGaussian, Ar1 };

/// Excitation specification.  WhiteGaussian draws i.i.d. N(0, power).
/// Ar1 runs x(n) = ar_coeff * x(n-1) + y(n), y ~ N(0,1), x(-1) = 0, and then
/// rescales the whole realization so its empirical power equals `power`
/// exactly (no burn-in; the rescaling absorbs the transient).
struct InputSpec {
  InputKind kind = InputKind::WhiteGaussian;
  double power = 1.0;
  double ar_coeff = 0.8;  // only used for Ar1, |ar_coeff| < 1
  std::uint64_t seed = 0;
};

struct NoiseSpec {
  double variance = 0.0;
  std::uint64_t seed = 0;
};

std::vector<double> gen_input(const InputSpec& spec, std::size_t n);

/// i.i.d. N(0, variance); variance == 0 yields an all-zero vector.
std::vector<double> gen_noise(const NoiseSpec& spec, std::size_t n);

/// d(n) = sum_i h_i x(n-i) + v(n) with zero prehistory (x(k) = 0 for k < 0).
/// Output length equals the input length; x and v must match.
std::vector<double> desired_output(const SystemModel& h,
                                   std::span<const double> x,
                                   std::span<const double> v);

}  // namespace zalms

#endif  // ZALMS_SIGNALS_HPP
