#include "zalms/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace zalms {

double msd(std::span<const double> w, std::span<const double> h) {
  if (w.size() != h.size()) {
    throw std::invalid_argument("msd: length mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double d = w[i] - h[i];
    acc += d * d;
  }
  return acc;
}

LearningCurve average_curves(const std::vector<std::vector<double>>& traces,
                             std::vector<std::uint64_t> seeds,
                             std::size_t record_every) {
  if (traces.empty()) {
    throw std::invalid_argument("average_curves: no traces");
  }
  const std::size_t len = traces.front().size();
  for (const auto& t : traces) {
    if (t.size() != len) {
      throw std::invalid_argument("average_curves: ragged trace lengths");
    }
  }
  LearningCurve out;
  out.trials = traces.size();
  out.record_every = record_every;
  out.seeds = std::move(seeds);
  out.msd.assign(len, 0.0);
  out.msd_stderr.assign(len, 0.0);
  const double inv_t = 1.0 / static_cast<double>(traces.size());
  for (const auto& t : traces) {
    for (std::size_t i = 0; i < len; ++i) out.msd[i] += t[i];
  }
  for (auto& v : out.msd) v *= inv_t;
  if (traces.size() > 1) {
    for (const auto& t : traces) {
      for (std::size_t i = 0; i < len; ++i) {
        const double d = t[i] - out.msd[i];
        out.msd_stderr[i] += d * d;
      }
    }
    const double scale = 1.0 / (static_cast<double>(traces.size()) - 1.0);
    for (auto& v : out.msd_stderr) {
      v = std::sqrt(v * scale) * std::sqrt(inv_t);  // sample std / sqrt(trials)
    }
  }
  return out;
}

std::pair<double, double> steady_state_estimate(std::span<const double> curve,
                                                double tail_fraction) {
  if (curve.empty()) {
    throw std::invalid_argument("steady_state_estimate: empty curve");
  }
  if (!(tail_fraction > 0.0) || !(tail_fraction <= 1.0)) {
    throw std::invalid_argument("steady_state_estimate: tail_fraction in (0,1]");
  }
  const std::size_t total = curve.size();
  std::size_t k = static_cast<std::size_t>(
      std::ceil(tail_fraction * static_cast<double>(total)));
  if (k < 1) k = 1;
  if (k > total) k = total;
  const std::span<const double> tail = curve.subspan(total - k);
  double mean = 0.0;
  for (double v : tail) mean += v;
  mean /= static_cast<double>(k);
  double var = 0.0;
  for (double v : tail) {
    const double d = v - mean;
    var += d * d;
  }
  var /= static_cast<double>(k);
  return {mean, std::sqrt(var)};
}

std::pair<double, double> steady_state_estimate(const LearningCurve& curve,
                                                double tail_fraction) {
  return steady_state_estimate(std::span<const double>(curve.msd), tail_fraction);
}

std::vector<double> to_db(std::span<const double> x, bool* clamped) {
  if (clamped) *clamped = false;
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double v = x[i];
    if (v < 0.0 || std::isnan(v)) {
      throw std::invalid_argument("to_db: negative entry");
    }
    if (v == 0.0) {
      v = 1e-300;
      if (clamped) *clamped = true;
    }
    out[i] = 10.0 * std::log10(v);
  }
  return out;
}

std::optional<std::uint64_t> first_crossing_db(
    std::span<const double> msd_linear, double target_db,
    std::size_t record_every) {
  const double threshold = std::pow(10.0, target_db / 10.0);
  for (std::size_t k = 0; k < msd_linear.size(); ++k) {
    if (msd_linear[k] <= threshold) {
      return (static_cast<std::uint64_t>(k) + 1) * record_every;
    }
  }
  return std::nullopt;
}

}  // namespace zalms
