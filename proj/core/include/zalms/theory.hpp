#ifndef ZALMS_THEORY_HPP
#define ZALMS_THEORY_HPP

#include <cstddef>
#include <stdexcept>

#include "zalms/ggd.hpp"

namespace zalms {

/// Raised when a closed-form prediction is requested outside its validity
/// region (mu at or beyond the stability bound, or an attraction term large
/// enough to drive the MSE denominator nonpositive).
class theory_out_of_range : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inputs of the mean-square analysis.  `ggd` is the steady-state tap
/// distribution (assumed equal to the unknown system's), used only through
/// the attraction probability.
struct TheoryInputs {
  double mu = 0.01;
  double rho = 0.0;
  double a = 0.0;
  double b = 0.0;
  std::size_t L = 100;
  double sigma_x2 = 1.0;
  double sigma_v2 = 0.0;
  GgdParams ggd{};
};

struct TheoryPrediction {
  double mu_max = 0.0;      // stability bound on mu
  double p_attract = 0.0;   // P_A, probability a tap lies in the window
  double mse = 0.0;         // predicted steady-state MSE
  double mse_lms = 0.0;     // same formula at rho = 0
  double excess_msd = 0.0;  // D(inf) = (mse - sigma_v2) / sigma_x2
  bool regime_ok = false;   // attraction term below 1% of the LMS denominator
};

/// Mean-square stability bound 2 / ((L + 2) sigma_x^2); the filter is stable
/// iff 0 < mu < this value.
double stability_bound(std::size_t L, double sigma_x2);

/// P_A = [theta(1/beta, (b/lambda)^beta) - theta(1/beta, (a/lambda)^beta)] / gamma(1/beta)
///     = 2 [F(b) - F(a)] for the zero-mean tap distribution.  b may be
/// infinite (the complete-gamma limit).  A nonzero GGD mean is rejected:
/// the formula is derived for taps symmetric about zero.
double attraction_probability(double a, double b, const GgdParams& ggd);

/// Steady-state MSE of plain LMS, (2 - 2 mu sx2) sv2 / (2 - mu sx2 (L+2)).
/// Arranged over the same subexpressions as steady_state_mse so the rho = 0
/// collapse of the full formula reproduces it bit for bit.
double lms_mse(double mu, std::size_t L, double sigma_x2, double sigma_v2);

/// Full steady-state prediction:
///   MSE = sv2 [mu A + L mu^2 sx2] / (mu A - rho^2 P_A L (2/(mu sx2) - 1)],
///   A = 2 - mu sx2 (L + 2).
TheoryPrediction steady_state_mse(const TheoryInputs& t);

}  // namespace zalms

#endif  // ZALMS_THEORY_HPP
