#include "vvix/special_functions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace vvix {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Central chi-squared density z^(nu/2-1) e^(-z/2) / (2^(nu/2) Gamma(nu/2)),
// evaluated in log space so small dof near z=0 stays accurate.
double central_chi2_pdf(double z, double nu) {
    if (z == 0.0) {
        if (nu < 2.0) return std::numeric_limits<double>::infinity();
        if (nu == 2.0) return 0.5;
        return 0.0;
    }
    const double half = 0.5 * nu;
    return std::exp((half - 1.0) * std::log(z) - 0.5 * z - half * M_LN2 - std::lgamma(half));
}

// Poisson(lambda/2) mixture of central chi-squared densities; the stable
// route when the Bessel argument sqrt(lambda*z) underflows.
double ncx2_pdf_mixture(double z, double dof, double lambda) {
    const double hl = 0.5 * lambda;
    double weight = std::exp(-hl);  // k = 0 Poisson weight
    double sum = 0.0;
    for (int k = 0; k < 2000; ++k) {
        const double term = weight * central_chi2_pdf(z, dof + 2.0 * k);
        sum += term;
        if (k > hl && term < kEps * sum) break;
        weight *= hl / (k + 1);
    }
    return sum;
}

// Lower-incomplete-gamma series for P(a,x), convergent and preferred when
// x < a + 1 (Abramowitz & Stegun 6.5.29).
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    const int n_max = 1000 + static_cast<int>(8.0 * std::sqrt(a + x));
    for (int n = 1; n < n_max; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps)
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw std::runtime_error("regularized_gamma_p: series failed to converge");
}

// Modified Lentz continued fraction for Q(a,x)=1-P(a,x), used when x >= a+1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    const int i_max = 1000 + static_cast<int>(8.0 * std::sqrt(a + x));
    for (int i = 1; i < i_max; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps)
            return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw std::runtime_error("regularized_gamma_p: continued fraction failed to converge");
}

// ln(e^{-x} I_nu(x)) for the regimes the direct series start and the
// large-argument expansion cannot reach: the exact series summed from its
// largest term in scaled space, and Olver's uniform large-order (Debye)
// expansion once the order itself is enormous. Only called with nu > 0.
double ln_bessel_scaled_fallback(double nu, double x) {
    if (nu >= 1e4) {
        // I_nu(nu s) ~ e^{nu eta} / (sqrt(2 pi nu) (1+s^2)^{1/4}) (1 + u1(t)/nu + ...),
        // eta = sqrt(1+s^2) + ln(s / (1 + sqrt(1+s^2))), t = 1/sqrt(1+s^2).
        // With three correction polynomials the relative error is O(nu^-4).
        const double s = x / nu;
        const double r = std::sqrt(1.0 + s * s);
        const double t = 1.0 / r;
        const double t2 = t * t;
        const double eta_minus_s = (r - s) + std::log(s / (1.0 + r));
        const double u1 = t * (3.0 - 5.0 * t2) / 24.0;
        const double u2 = t2 * (81.0 - 462.0 * t2 + 385.0 * t2 * t2) / 1152.0;
        const double u3 =
            t * t2 * (30375.0 - 369603.0 * t2 + 765765.0 * t2 * t2 - 425425.0 * t2 * t2 * t2) /
            414720.0;
        const double corr = 1.0 + u1 / nu + u2 / (nu * nu) + u3 / (nu * nu * nu);
        return nu * eta_minus_s - 0.5 * std::log(2.0 * M_PI * nu) - 0.25 * std::log1p(s * s) +
               std::log(corr);
    }

    // Exact series Sum_k (x/2)^{nu+2k} / (k! Gamma(nu+k+1)): all terms positive,
    // so starting at the largest one and accumulating relative factors gives
    // full precision regardless of how small the k = 0 term is.
    const double q = 0.25 * x * x;
    double k0 = 0.5 * (-(nu + 2.0) + std::sqrt((nu + 2.0) * (nu + 2.0) + 4.0 * q));
    k0 = k0 > 0.0 ? std::floor(k0) : 0.0;
    const double ln_peak = (nu + 2.0 * k0) * std::log(0.5 * x) - std::lgamma(k0 + 1.0) -
                           std::lgamma(nu + k0 + 1.0) - x;
    double sum = 1.0;
    double rel = 1.0;
    for (double k = k0 + 1.0; k < k0 + 400000.0; ++k) {
        rel *= q / (k * (nu + k));
        sum += rel;
        if (rel < sum * kEps) break;
    }
    rel = 1.0;
    for (double k = k0; k >= 1.0; --k) {
        rel *= (k * (nu + k)) / q;
        sum += rel;
        if (rel < sum * kEps) break;
    }
    return ln_peak + std::log(sum);
}

// ln(e^{-x} I_nu(x)) across every regime; the pieces of ncx2_pdf can each
// overflow or underflow for extreme orders even when the density itself is
// moderate, so the assembly needs the logarithm directly.
double ln_bessel_i_scaled(double nu, double x) {
    if (x == 0.0)
        return nu == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
    if (x <= 100.0) {
        const double e0 = nu * std::log(0.5 * x) - std::lgamma(nu + 1.0) - x;
        if (e0 > -700.0) return std::log(bessel_i_scaled(nu, x));
    } else if (nu * nu <= 0.5 * x) {
        return std::log(bessel_i_scaled(nu, x));
    }
    return ln_bessel_scaled_fallback(nu, x);
}

}  // namespace

double bessel_i_scaled(double nu, double x) {
    if (!(nu > -1.0)) throw std::domain_error("bessel_i_scaled: order must exceed -1");
    if (!(x >= 0.0)) throw std::domain_error("bessel_i_scaled: argument must be nonnegative");
    if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;

    if (x <= 100.0) {
        // e^{-x} Sum_k (x/2)^{nu+2k} / (k! Gamma(nu+k+1)), the e^{-x} folded
        // into the leading term so nothing overflows on the way. Once the
        // leading term underflows (huge order), restart the sum at its peak.
        const double e0 = nu * std::log(0.5 * x) - std::lgamma(nu + 1.0) - x;
        if (e0 <= -700.0) return std::exp(ln_bessel_scaled_fallback(nu, x));
        double term = std::exp(e0);
        double sum = term;
        const double q = 0.25 * x * x;
        for (int k = 1; k < 1000; ++k) {
            term *= q / (k * (nu + k));
            sum += term;
            if (term < sum * kEps) return sum;
        }
        throw std::runtime_error("bessel_i_scaled: series failed to converge");
    }

    // Large-argument expansion e^{-x} I_nu(x) ~ (2 pi x)^{-1/2} Sum_k a_k,
    // a_0 = 1, a_k = -a_{k-1} (mu - (2k-1)^2) / (8 k x), mu = 4 nu^2. Only
    // trustworthy when the first factor is already well below one; the
    // mode-started series covers the rest of the (nu, x) plane.
    const double mu = 4.0 * nu * nu;
    if (mu > 2.0 * x) return std::exp(ln_bessel_scaled_fallback(nu, x));
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 40; ++k) {
        const double factor = (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k * x);
        if (std::abs(factor) >= 1.0) break;  // divergent tail reached
        term *= -factor;
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps) break;
    }
    return sum / std::sqrt(2.0 * M_PI * x);
}

double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0)) throw std::domain_error("regularized_gamma_p: a must be positive");
    if (!(x >= 0.0)) throw std::domain_error("regularized_gamma_p: x must be nonnegative");
    if (x == 0.0) return 0.0;
    return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double ncx2_pdf(double z, double dof, double lambda) {
    if (!(dof > 0.0)) throw std::domain_error("ncx2_pdf: dof must be positive");
    if (!(lambda >= 0.0)) throw std::domain_error("ncx2_pdf: noncentrality must be nonnegative");
    if (!(z >= 0.0)) throw std::domain_error("ncx2_pdf: argument must be nonnegative");

    if (z == 0.0) {
        if (dof < 2.0) return std::numeric_limits<double>::infinity();
        if (dof == 2.0) return 0.5 * std::exp(-0.5 * lambda);
        return 0.0;
    }

    const double bessel_arg = std::sqrt(lambda * z);
    if (bessel_arg < 1e-8) return ncx2_pdf_mixture(z, dof, lambda);

    // p(z) = 1/2 e^{-(z+lambda)/2} (z/lambda)^{d/4-1/2} I_{d/2-1}(sqrt(lambda z)),
    // assembled with the scaled Bessel so the exponent collapses to the
    // well-conditioned -(sqrt(z)-sqrt(lambda))^2/2.
    const double nu = 0.5 * dof - 1.0;
    const double root_diff = std::sqrt(z) - std::sqrt(lambda);
    const double power_log = 0.5 * nu * std::log(z / lambda);
    if (nu > 30.0 || std::abs(power_log) > 600.0) {
        // Extreme orders: the power factor and the scaled Bessel can each
        // leave the double range while their product stays moderate, so
        // combine the three exponents before exponentiating.
        return 0.5 * std::exp(-0.5 * root_diff * root_diff + power_log +
                              ln_bessel_i_scaled(nu, bessel_arg));
    }
    return 0.5 * std::exp(-0.5 * root_diff * root_diff) *
           std::pow(z / lambda, 0.5 * nu) * bessel_i_scaled(nu, bessel_arg);
}

double ncx2_cdf(double z, double dof, double lambda) {
    if (!(dof > 0.0)) throw std::domain_error("ncx2_cdf: dof must be positive");
    if (!(lambda >= 0.0)) throw std::domain_error("ncx2_cdf: noncentrality must be nonnegative");
    if (!(z >= 0.0)) throw std::domain_error("ncx2_cdf: argument must be nonnegative");
    if (z == 0.0) return 0.0;
    if (std::isinf(z)) return 1.0;

    // Sum_k Poisson(k; lambda/2) P(d/2+k, z/2), all pieces updated by
    // recurrence: the gamma tail term t_k = (z/2)^{a_k} e^{-z/2}/Gamma(a_k+1)
    // steps P down as the mixture order steps up. Past lambda/2 ~ 1400 the
    // k = 0 Poisson weight underflows, so the sum then starts a dozen
    // standard deviations below the Poisson mode instead (the skipped head
    // carries less than e^-70 of the mixture).
    const double hl = 0.5 * lambda;
    const double hz = 0.5 * z;
    const double a = 0.5 * dof;
    double k_start = 0.0;
    if (hl > 700.0) k_start = std::max(0.0, std::floor(hl - 12.0 * std::sqrt(hl) - 20.0));
    double weight = k_start == 0.0
                        ? std::exp(-hl)
                        : std::exp(k_start * std::log(hl) - hl - std::lgamma(k_start + 1.0));
    double p = regularized_gamma_p(a + k_start, hz);
    double t = std::exp((a + k_start) * std::log(hz) - hz - std::lgamma(a + k_start + 1.0));
    double cdf = 0.0;
    const double k_stop = k_start + 30.0 * std::sqrt(hl + 1.0) + 10000.0;
    for (double k = k_start; k < k_stop; ++k) {
        cdf += weight * p;
        if (k > hl && weight * p < kEps * cdf) break;
        weight *= hl / (k + 1.0);
        p -= t;
        if (p < 0.0) p = 0.0;  // clamp recurrence round-off
        t *= hz / (a + k + 1.0);
    }
    return std::min(cdf, 1.0);
}

double ncx2_quantile(double p, double dof, double lambda) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("ncx2_quantile: p must lie in (0,1)");

    double lo = 0.0;
    double hi = dof + lambda + 1.0;
    int guard = 0;
    while (ncx2_cdf(hi, dof, lambda) < p) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 1100) throw std::runtime_error("ncx2_quantile: bracketing failed");
    }
    for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (ncx2_cdf(mid, dof, lambda) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace vvix
