#include "zalms/signals.hpp"

#include <cmath>
#include <stdexcept>

#include "zalms/rng.hpp"

namespace zalms {

std::vector<double> gen_input(const InputSpec& spec, std::size_t n) {
  if (!(spec.power > 0.0) || !std::isfinite(spec.power)) {
    throw std::domain_error("InputSpec: power must be > 0");
  }
  std::vector<double> x(n);
  Rng rng(spec.seed);
  if (spec.kind == InputKind::WhiteGaussian) {
    const double sd = std::sqrt(spec.power);
    for (auto& v : x) v = sd * rng.gaussian();
    return x;
  }
  if (!(std::fabs(spec.ar_coeff) < 1.0)) {
    throw std::domain_error("InputSpec: |ar_coeff| must be < 1");
  }
  double prev = 0.0;
  double sumsq = 0.0;
  for (auto& v : x) {
    prev = spec.ar_coeff * prev + rng.gaussian();
    v = prev;
    sumsq += prev * prev;
  }
  if (n > 0 && sumsq > 0.0) {
    const double scale = std::sqrt(spec.power * static_cast<double>(n) / sumsq);
    for (auto& v : x) v *= scale;
  }
  return x;
}

std::vector<double> gen_noise(const NoiseSpec& spec, std::size_t n) {
  if (!(spec.variance >= 0.0) || !std::isfinite(spec.variance)) {
    throw std::domain_error("NoiseSpec: variance must be >= 0");
  }
  std::vector<double> v(n, 0.0);
  if (spec.variance == 0.0) return v;
  Rng rng(spec.seed);
  const double sd = std::sqrt(spec.variance);
  for (auto& e : v) e = sd * rng.gaussian();
  return v;
}

std::vector<double> desired_output(const SystemModel& h,
                                   std::span<const double> x,
                                   std::span<const double> v) {
  if (x.size() != v.size()) {
    throw std::invalid_argument("desired_output: x and v lengths differ");
  }
  const std::size_t L = h.taps.size();
  std::vector<double> d(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) {
    double acc = 0.0;
    const std::size_t imax = std::min(n + 1, L);
    for (std::size_t i = 0; i < imax; ++i) {
      acc += h.taps[i] * x[n - i];
    }
    d[n] = acc + v[n];
  }
  return d;
}

}  // namespace zalms
