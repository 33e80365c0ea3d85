#include "vvix/cf_pricer.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "vvix/quadrature.hpp"

namespace vvix {
namespace {

using cplx = std::complex<double>;

double norm_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

// log(1+z) that stays relatively accurate for |z| << 1, where forming 1+z
// first would wipe the low bits the Heston exponent divides back out by
// sigma^2.
cplx log1p_complex(cplx z) {
    if (std::abs(z) > 1e-4) return std::log(1.0 + z);
    // series with |error| <= |z|^6/6
    return z * (1.0 - z * (0.5 - z * (1.0 / 3.0 - z * (0.25 - z * 0.2))));
}

// Characteristic function E[exp(i u ln(F_T/F_0))] of the zero-drift log
// forward, in the branch-stable parameterization: the ratio g stays inside
// the unit disc so the complex log never crosses a cut, and xi - dd is formed
// from the difference of squares so nothing cancels when sigma is tiny.
cplx heston_cf(cplx u, const HestonParams& p, double T) {
    const cplx iu(-u.imag(), u.real());  // i*u
    const double s2 = p.sigma * p.sigma;
    const cplx xi = p.kappa - p.rho * p.sigma * iu;
    const cplx dd = std::sqrt(xi * xi + s2 * (iu + u * u));
    const cplx xi_minus_d = -s2 * (iu + u * u) / (xi + dd);  // xi - dd, cancellation-free
    const cplx g = xi_minus_d / (xi + dd);
    const cplx e = std::exp(-dd * T);

    const cplx log_ratio = log1p_complex(-g * e) - log1p_complex(-g);
    const cplx big_c = p.kappa * p.theta / s2 * (xi_minus_d * T - 2.0 * log_ratio);
    const cplx big_d = xi_minus_d / s2 * (1.0 - e) / (1.0 - g * e);
    return std::exp(big_c + big_d * p.v0);
}

}  // namespace

double black_price(double forward, double strike, double T, double vol, int eta) {
    if (!(forward > 0.0) || !(strike >= 0.0) || !(T > 0.0) || !(vol >= 0.0))
        throw std::invalid_argument("black_price: invalid inputs");
    if (eta != 1 && eta != -1) throw std::invalid_argument("black_price: eta must be +1 or -1");
    const double stdev = vol * std::sqrt(T);
    if (strike == 0.0 || stdev == 0.0)
        return std::max(eta * (forward - strike), 0.0);
    const double d1 = std::log(forward / strike) / stdev + 0.5 * stdev;
    const double d2 = d1 - stdev;
    return eta * (forward * norm_cdf(eta * d1) - strike * norm_cdf(eta * d2));
}

double bs_vega(double forward, double strike, double T, double sigma_impl, double discount) {
    if (!(forward > 0.0) || !(strike > 0.0) || !(T > 0.0) || !(sigma_impl > 0.0) ||
        !(discount > 0.0))
        throw std::invalid_argument("bs_vega: inputs must be positive");
    const double srt = sigma_impl * std::sqrt(T);
    const double d1 = std::log(forward / strike) / srt + 0.5 * srt;
    const double phi = std::exp(-0.5 * d1 * d1) / std::sqrt(2.0 * M_PI);
    return discount * forward * phi * std::sqrt(T);
}

double implied_vol_black(double forward, double strike, double T, double price, int eta) {
    const double intrinsic = std::max(eta * (forward - strike), 0.0);
    const double cap = eta > 0 ? forward : strike;  // no-arbitrage price bounds
    if (!(price >= intrinsic) || !(price < cap))
        throw std::invalid_argument("implied_vol_black: price outside arbitrage bounds");
    if (price == intrinsic) return 0.0;

    double lo = 0.0, hi = 10.0;
    while (black_price(forward, strike, T, hi, eta) < price) {
        hi *= 2.0;
        if (hi > 1e6) throw std::runtime_error("implied_vol_black: failed to bracket");
    }
    for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (black_price(forward, strike, T, mid, eta) < price ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double heston_vanilla_price(const HestonParams& params, const MarketConvention& conv, double spot,
                            double strike, double T, bool is_call) {
    params.validate();
    if (!(spot > 0.0) || !(T > 0.0) || !(strike >= 0.0))
        throw std::invalid_argument("heston_vanilla_price: invalid inputs");

    const double forward = spot * std::exp((conv.r - conv.q) * T);
    if (strike == 0.0) return is_call ? forward : 0.0;

    // Half-line integral for the undiscounted call: the contour through
    // Im(u) = -1/2 splits geometrically between F and K, and the residue term
    // is F (covered call representation):
    //   C = F - sqrt(FK)/pi * Int_0^inf Re[e^{iuk} cf(u - i/2)] / (u^2 + 1/4) du,
    // with k = ln(F/K).
    const double k = std::log(forward / strike);
    auto integrand = [&](double u) {
        const cplx shifted(u, -0.5);
        const cplx val = std::exp(cplx(0.0, u * k)) * heston_cf(shifted, params, T);
        return val.real() / (u * u + 0.25);
    };
    QuadratureSpec spec;
    spec.rel_tol = 1e-11;
    // The integral only determines the OTM side (the ITM side is intrinsic
    // plus the same number), so demand absolute accuracy on the OTM price
    // scale; the max() floor keeps extreme-strike integrals (which cancel to
    // nearly zero price impact) from chasing unreachable relative targets.
    spec.abs_tol = std::max(1e-12 * std::min(forward, strike), 1e-14 * std::max(forward, strike)) *
                   M_PI / std::sqrt(forward * strike);
    // far strikes oscillate at frequency |k|; give the refinement headroom
    spec.max_subdivisions = 2000;
    const double integral = integrate(integrand, 0.0, kInfiniteBound, spec);
    const double call = forward - std::sqrt(forward * strike) / M_PI * integral;
    return is_call ? call : call - (forward - strike);  // undiscounted parity
}

}  // namespace vvix
