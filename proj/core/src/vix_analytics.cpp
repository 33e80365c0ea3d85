#include "vvix/vix_analytics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "vvix/quadrature.hpp"
#include "vvix/special_functions.hpp"

namespace vvix {
namespace {

// Everything the single-integral quantities share: the transition to T, the
// affine map z -> VIX^2, the truncation quantile and a singularity-aware
// quadrature spec.
struct TransitionIntegrals {
    CirTransition trans;
    double lambda;     // noncentrality at v0
    double floor_var;  // (1-B) theta, the v-independent part of VIX^2
    double slope;      // B c1, so VIX^2(z) = floor_var + slope z
    double z_lo;       // lower truncation: ~0 when the density peaks there, else
                       // the 1e-12 quantile so a far-from-origin bulk (small
                       // vol-of-vol makes the law a narrow needle around
                       // d + lambda) always spans an O(1) fraction of the range
    double z_hi;       // upper truncation, the 1 - 1e-10 quantile
    double blob_mass = 0.0;  // probability below z_lo, integrated analytically
    QuadratureSpec spec;

    double vix_points(double z) const { return 100.0 * std::sqrt(floor_var + slope * z); }
    double pdf(double z) const { return ncx2_pdf(z, trans.d, lambda); }
};

TransitionIntegrals make_integrals(const HestonParams& params, double T,
                                   const MarketConvention& conv) {
    params.validate();
    if (!(T > 0.0)) throw std::invalid_argument("vix analytics: T must be positive");

    TransitionIntegrals ti;
    ti.trans = cir_transition(params, T);
    ti.lambda = ti.trans.lambda_of(params.v0);
    const double b = variance_weight(params.kappa, conv.delta);
    ti.floor_var = (1.0 - b) * params.theta;
    ti.slope = b * ti.trans.c1;
    ti.z_hi = ncx2_quantile(1.0 - 1e-10, ti.trans.d, ti.lambda);
    if (ti.trans.d < 2.0) {
        // The density diverges at the origin, so in principle the range starts
        // at zero. For very small dof, though, the z^{d/2-1} blow-up exceeds
        // double range near the origin (the true density value overflows once
        // (1 - d/2) ln(1/z) passes ~709), so pointwise evaluation is
        // impossible there. Below a cut chosen to keep the density exponent
        // under 600 every integrand of interest is constant to machine
        // precision (VIX^2 moves by slope * z_cut), so that sliver integrates
        // to payoff(0) * cdf(z_cut) exactly. The cut underflows to 0 -- and
        // this reduces to a plain [0, z_hi] integral -- unless d < ~0.39.
        ti.z_lo = std::exp(-600.0 / (1.0 - 0.5 * ti.trans.d));
        if (ti.z_lo > 0.0) ti.blob_mass = ncx2_cdf(ti.z_lo, ti.trans.d, ti.lambda);
        ti.spec.left_singularity = true;
        ti.spec.singularity_dof = ti.trans.d;
        // The substitution panel has to absorb the whole z^{d/2-1} power-law
        // range. Its natural end is the 0.1% quantile, but that quantile
        // scales like exp(-O(1/d)) and for tiny dof leaves dozens of decades
        // of singular shape to plain bisection, which then exhausts the
        // subdivision budget; never end the panel below z ~ 1, where the
        // exponential damping of the density takes over from the power law.
        const double eps = ncx2_quantile(1e-3, ti.trans.d, ti.lambda);
        ti.spec.left_epsilon = std::min(std::max(eps, 1.0), 0.5 * ti.z_hi);
    } else {
        ti.z_lo = ncx2_quantile(1e-12, ti.trans.d, ti.lambda);
    }
    return ti;
}

// Integral of f against the transition density over [z_lo, z_hi], with the
// density singularity at the origin handled by the quadrature substitution and
// any unrepresentable-density sliver below z_lo added back analytically.
double expectation(const TransitionIntegrals& ti, const std::function<double(double)>& f) {
    const double blob = ti.blob_mass > 0.0 ? f(0.0) * ti.blob_mass : 0.0;
    return blob +
           integrate([&](double z) { return f(z) * ti.pdf(z); }, ti.z_lo, ti.z_hi, ti.spec);
}

}  // namespace

IndexQuote vix_future(const HestonParams& params, double T, const MarketConvention& conv) {
    const TransitionIntegrals ti = make_integrals(params, T, conv);
    return {expectation(ti, [&](double z) { return ti.vix_points(z); }), T};
}

double vix_option(const HestonParams& params, double strike, double T, int eta,
                  const MarketConvention& conv) {
    if (!(strike >= 0.0)) throw std::invalid_argument("vix_option: strike must be nonnegative");
    if (eta != 1 && eta != -1) throw std::invalid_argument("vix_option: eta must be +1 or -1");

    const TransitionIntegrals ti = make_integrals(params, T, conv);
    // The payoff kink in z-space: VIX^2(z*) = (K/100)^2.
    const double k_var = strike / 100.0 * (strike / 100.0);
    const double z_star = (k_var - ti.floor_var) / ti.slope;

    if (eta > 0) {
        const double lo = std::max(z_star, ti.z_lo);
        if (lo >= ti.z_hi) return 0.0;
        QuadratureSpec spec = ti.spec;
        spec.left_singularity = ti.spec.left_singularity && lo == ti.z_lo;
        const double blob = z_star < ti.z_lo
                                ? std::max(ti.vix_points(0.0) - strike, 0.0) * ti.blob_mass
                                : 0.0;
        return blob + integrate([&](double z) { return (ti.vix_points(z) - strike) * ti.pdf(z); },
                                lo, ti.z_hi, spec);
    }

    const double hi = std::min(z_star, ti.z_hi);
    if (hi <= ti.z_lo) return 0.0;
    const double blob = std::max(strike - ti.vix_points(0.0), 0.0) * ti.blob_mass;
    return blob + integrate([&](double z) { return (strike - ti.vix_points(z)) * ti.pdf(z); },
                            ti.z_lo, hi, ti.spec);
}

IndexQuote vvix_log_contract(const HestonParams& params, double T, const MarketConvention& conv) {
    const TransitionIntegrals ti = make_integrals(params, T, conv);
    const double future = vix_future(params, T, conv).points;
    const double log_f = std::log(future / 100.0);

    // -(2/T) E[ln(F_T/F_0)]: the martingale property of the future makes the
    // expected log return negative, hence the result positive.
    const double mean_log =
        expectation(ti, [&](double z) { return std::log(ti.vix_points(z) / 100.0) - log_f; });
    const double vvix_sq = -2.0 / T * mean_log;
    if (vvix_sq < 0.0)
        throw std::runtime_error("vvix_log_contract: negative variance " +
                                 std::to_string(vvix_sq) + " (setup or sign bug)");
    return {100.0 * std::sqrt(vvix_sq), T};
}

IndexQuote vvix_simple(const HestonParams& params, double T, const MarketConvention& conv) {
    params.validate();
    if (!(T > 0.0)) throw std::invalid_argument("vvix_simple: T must be positive");

    const double b = variance_weight(params.kappa, conv.delta);
    const double a0 = (1.0 - b) * params.theta;  // VIX^2 = a0 + b v_T

    const double ev = expected_variance(params, params.v0, T);
    const double ev2 = second_moment_variance_paper(params, T);
    const double m2 = a0 + b * ev;                                // E[VIX^2]
    const double m4 = a0 * a0 + 2.0 * a0 * b * ev + b * b * ev2;  // E[VIX^4]

    const double var_vix2 = m4 - m2 * m2;
    if (var_vix2 < 0.0)
        throw std::runtime_error("vvix_simple: negative index variance " +
                                 std::to_string(var_vix2) +
                                 " from the proxy second moment at sigma=" +
                                 std::to_string(params.sigma));
    // Taylor: Var[sqrt(Y)] ~ Var[Y] / (4 E[Y]); then the lognormal back-out.
    const double var_vix = var_vix2 / (4.0 * m2);
    return {100.0 * std::sqrt(std::log1p(var_vix / m2) / T), T};
}

double solve_sigma_for_vvix(double target_points, const HestonParams& others, double T,
                            const MarketConvention& conv) {
    if (!(target_points > 0.0))
        throw std::invalid_argument("solve_sigma_for_vvix: target must be positive");

    constexpr double kLo = 1e-4;
    constexpr double kHi = 20.0;
    auto value_at = [&](double sigma) {
        HestonParams p = others;
        p.sigma = sigma;
        return vvix_simple(p, T, conv).points;
    };

    // Monotonicity pre-check on a geometric ladder across the bracket; the
    // Newton safeguards below assume a single crossing.
    double prev = value_at(kLo);
    const double v_lo = prev;
    for (int i = 1; i <= 32; ++i) {
        const double s = kLo * std::pow(kHi / kLo, i / 32.0);
        const double cur = value_at(s);
        if (!(cur > prev))
            throw NonMonotoneError("solve_sigma_for_vvix: approximation not increasing near sigma=" +
                                   std::to_string(s));
        prev = cur;
    }
    const double v_hi = prev;
    if (target_points < v_lo || target_points > v_hi)
        throw NoBracketError("solve_sigma_for_vvix: target " + std::to_string(target_points) +
                             " outside attainable range [" + std::to_string(v_lo) + ", " +
                             std::to_string(v_hi) + "]");

    double lo = kLo, hi = kHi;
    double sigma = std::sqrt(lo * hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double g = value_at(sigma) - target_points;
        if (std::abs(g) < 1e-12 * std::max(1.0, target_points)) break;
        (g < 0.0 ? lo : hi) = sigma;
        if (hi - lo < 1e-14 * hi) break;

        const double h = 1e-6 * std::max(1.0, sigma);
        const double slope = (value_at(sigma + h) - value_at(sigma - h)) / (2.0 * h);
        double next = slope > 0.0 ? sigma - g / slope : lo;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // bisection safeguard
        sigma = next;
    }
    return sigma;
}

}  // namespace vvix
