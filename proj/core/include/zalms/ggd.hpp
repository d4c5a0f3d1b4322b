#ifndef ZALMS_GGD_HPP
#define ZALMS_GGD_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

namespace zalms {

/// Generalized Gaussian distribution parameters.  `mean` is the location of
/// the density, `sigma_g` its standard deviation, and `beta` the shape
/// exponent: beta = 2 is Gaussian, beta = 1 Laplacian, and small beta means
/// heavy concentration near the mean (a sparser tap profile).
struct GgdParams {
  double mean = 0.0;
  double sigma_g = 1.0;
  double beta = 2.0;
};

/// Throws std::invalid_argument unless sigma_g > 0, beta > 0 and the derived
/// scale is finite and positive.
void validate(const GgdParams& p);

/// Scale lambda = sigma_g * sqrt(gamma(1/beta) / gamma(3/beta)), evaluated
/// through log-gamma so it stays finite down to beta = 0.01.
double ggd_lambda(const GgdParams& p);

/// Density f(x) = beta / (2 lambda gamma(1/beta)) * exp(-(|x-mean|/lambda)^beta).
double ggd_pdf(double x, const GgdParams& p);

/// Distribution function
///   F(x) = 1/2 + sgn(x-mean) * theta(1/beta, (|x-mean|/lambda)^beta) / (2 gamma(1/beta)).
double ggd_cdf(double x, const GgdParams& p);

/// n i.i.d. draws.  Sampling is the exact gamma-power transform: with
/// G ~ Gamma(1/beta, 1) and S a uniform sign, X = mean + S * lambda * G^(1/beta).
/// Deterministic in `seed`; valid for every beta > 0, no rejection tuning.
std::vector<double> sample_ggd(std::uint64_t seed, std::size_t n,
                               const GgdParams& p);

}  // namespace zalms

#endif  // ZALMS_GGD_HPP
