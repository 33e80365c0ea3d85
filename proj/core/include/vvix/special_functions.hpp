#pragma once

namespace vvix {

// Exponentially scaled modified Bessel function e^{-x}·I_nu(x).
// Valid for nu > -1 (covers the non-central chi-squared order d/2-1 for any
// d > 0) and x >= 0. Power series below x=100, asymptotic expansion above;
// the scaling keeps the result representable for arbitrarily large x.
double bessel_i_scaled(double nu, double x);

// Regularized lower incomplete gamma P(a, x) for a > 0, x >= 0.
double regularized_gamma_p(double a, double x);

// Non-central chi-squared density with `dof` degrees of freedom and
// noncentrality `lambda`, evaluated through the scaled Bessel-I form; falls
// back to the Poisson-mixture series when sqrt(lambda·z) is too small for
// the Bessel form to be stable. For dof < 2 the density diverges like
// z^(dof/2-1) as z -> 0+.
double ncx2_pdf(double z, double dof, double lambda);

// Distribution function of the same law, via the Poisson mixture of central
// chi-squared distribution functions.
double ncx2_cdf(double z, double dof, double lambda);

// Inverse of ncx2_cdf by bisection; p must lie in (0, 1).
double ncx2_quantile(double p, double dof, double lambda);

}  // namespace vvix
