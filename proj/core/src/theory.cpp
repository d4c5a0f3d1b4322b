#include "zalms/theory.hpp"

#include <cmath>

#include "zalms/special.hpp"

namespace zalms {
namespace {

double attraction_term(double rho, double p_attract, std::size_t L, double mu,
                       double sigma_x2) {
  return rho * rho * p_attract * static_cast<double>(L) *
         (2.0 / (mu * sigma_x2) - 1.0);
}

}  // namespace

double stability_bound(std::size_t L, double sigma_x2) {
  if (L < 1) throw std::invalid_argument("stability_bound: L must be >= 1");
  if (!(sigma_x2 > 0.0) || !std::isfinite(sigma_x2)) {
    throw std::invalid_argument("stability_bound: sigma_x2 must be > 0");
  }
  return 2.0 / ((static_cast<double>(L) + 2.0) * sigma_x2);
}

double attraction_probability(double a, double b, const GgdParams& ggd) {
  validate(ggd);
  if (ggd.mean != 0.0) {
    throw std::invalid_argument(
        "attraction_probability: derived for zero-mean taps");
  }
  if (!(a >= 0.0) || !(a < b)) {
    throw std::invalid_argument("attraction_probability: need 0 <= a < b");
  }
  const double lambda = ggd_lambda(ggd);
  const double s = 1.0 / ggd.beta;
  double pb;
  if (std::isinf(b)) {
    pb = 1.0;
  } else {
    const double arg = std::pow(b / lambda, ggd.beta);
    pb = std::isinf(arg) ? 1.0 : regularized_lower_gamma(s, arg);
  }
  double pa = 0.0;
  if (a > 0.0) {
    const double arg = std::pow(a / lambda, ggd.beta);
    pa = std::isinf(arg) ? 1.0 : regularized_lower_gamma(s, arg);
  }
  double p = pb - pa;
  if (p < 0.0) p = 0.0;
  if (p > 1.0) p = 1.0;
  return p;
}

double lms_mse(double mu, std::size_t L, double sigma_x2, double sigma_v2) {
  const double mu_max = stability_bound(L, sigma_x2);
  if (!(mu > 0.0) || !(mu < mu_max)) {
    throw theory_out_of_range("lms_mse: mu outside (0, stability bound)");
  }
  if (!(sigma_v2 >= 0.0)) {
    throw std::invalid_argument("lms_mse: sigma_v2 must be >= 0");
  }
  const double Ld = static_cast<double>(L);
  const double A = 2.0 - mu * sigma_x2 * (Ld + 2.0);
  // Equals (2 - 2 mu sx2) sv2 / (2 - mu sx2 (L+2)); this arrangement shares
  // its numerator and denominator with steady_state_mse.
  return sigma_v2 * (mu * A + Ld * mu * mu * sigma_x2) / (mu * A);
}

TheoryPrediction steady_state_mse(const TheoryInputs& t) {
  if (!(t.rho >= 0.0) || !std::isfinite(t.rho)) {
    throw std::invalid_argument("steady_state_mse: rho must be >= 0");
  }
  if (!(t.sigma_v2 >= 0.0)) {
    throw std::invalid_argument("steady_state_mse: sigma_v2 must be >= 0");
  }
  TheoryPrediction pred;
  pred.mu_max = stability_bound(t.L, t.sigma_x2);
  if (!(t.mu > 0.0) || !(t.mu < pred.mu_max)) {
    throw theory_out_of_range("steady_state_mse: mu outside (0, stability bound)");
  }
  pred.p_attract = attraction_probability(t.a, t.b, t.ggd);

  const double Ld = static_cast<double>(t.L);
  const double A = 2.0 - t.mu * t.sigma_x2 * (Ld + 2.0);
  const double numer = t.sigma_v2 * (t.mu * A + Ld * t.mu * t.mu * t.sigma_x2);
  const double den_lms = t.mu * A;
  const double term = attraction_term(t.rho, pred.p_attract, t.L, t.mu, t.sigma_x2);
  pred.mse_lms = numer / den_lms;
  const double den = den_lms - term;
  if (!(den > 0.0)) {
    throw theory_out_of_range(
        "steady_state_mse: attraction term makes the denominator nonpositive");
  }
  pred.mse = numer / den;
  pred.excess_msd = (pred.mse - t.sigma_v2) / t.sigma_x2;
  pred.regime_ok = term < 0.01 * den_lms;
  return pred;
}

}  // namespace zalms
