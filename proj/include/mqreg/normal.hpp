#pragma once

// Standard normal CDF, PDF and inverse CDF.

namespace mqreg {

double normal_pdf(double x);
double normal_cdf(double x);

// Inverse standard normal CDF. Throws std::domain_error unless p is in (0,1).
// Rational initial approximation refined by one Halley step on normal_cdf.
double normal_quantile(double p);

// Phi^{-1}(3/4), the MAD-to-sigma consistency constant.
inline constexpr double kMadConsistency = 0.67448975019608171;

}  // namespace mqreg
