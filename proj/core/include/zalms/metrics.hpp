#ifndef ZALMS_METRICS_HPP
#define ZALMS_METRICS_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace zalms {

/// Squared l2 misalignment ||w - h||^2 (unnormalized).
double msd(std::span<const double> w, std::span<const double> h);

/// Ensemble-averaged learning curve.  `msd` is the pointwise mean over
/// trials on a linear scale; `msd_stderr` the pointwise sample-std / sqrt(trials).
/// `mse_hat` and `attracted` are optional companion traces (empty when unused).
struct LearningCurve {
  std::vector<double> msd;
  std::vector<double> msd_stderr;
  std::vector<double> mse_hat;
  std::vector<double> attracted;
  std::size_t trials = 0;
  std::size_t record_every = 1;
  std::vector<std::uint64_t> seeds;
};

/// Pointwise arithmetic mean of equal-length traces; also fills the
/// standard-error trace.  Throws on an empty list or ragged lengths.
LearningCurve average_curves(const std::vector<std::vector<double>>& traces,
                             std::vector<std::uint64_t> seeds = {},
                             std::size_t record_every = 1);

/// Mean and (population) std of the last ceil(tail_fraction * len) points.
std::pair<double, double> steady_state_estimate(std::span<const double> curve,
                                                double tail_fraction);
std::pair<double, double> steady_state_estimate(const LearningCurve& curve,
                                                double tail_fraction);

/// 10*log10(x) elementwise.  Entries must be >= 0; exact zeros are clamped
/// to 1e-300 and reported through `clamped` when provided.  Negative entries
/// throw.
std::vector<double> to_db(std::span<const double> x, bool* clamped = nullptr);

/// First iteration at which the linear-scale curve reaches target_db
/// (10*log10(msd) <= target_db).  Recorded index k corresponds to iteration
/// (k+1)*record_every.  Empty when the curve never crosses.
std::optional<std::uint64_t> first_crossing_db(std::span<const double> msd_linear,
                                               double target_db,
                                               std::size_t record_every = 1);

}  // namespace zalms

#endif  // ZALMS_METRICS_HPP
