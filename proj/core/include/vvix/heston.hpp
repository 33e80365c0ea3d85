#pragma once

#include <array>
#include <cstddef>
#include <string>

// Heston/CIR parameterization, market conventions and the closed-form moments
// of the variance process. Everything in this header is a pure function of its
// arguments; all rates and variances are annualized, ACT/365.

namespace vvix {

// The five Heston parameters:
//   dX = (r - q) X dt + sqrt(v) X dW1
//   dv = kappa (theta - v) dt + sigma sqrt(v) dW2,   d<W1,W2> = rho dt
struct HestonParams {
    double v0;     // initial variance (annualized)
    double kappa;  // mean-reversion speed (1/year)
    double theta;  // long-run variance (annualized)
    double rho;    // spot/vol correlation
    double sigma;  // vol-of-vol

    // Standard Feller condition 2*kappa*theta >= sigma^2 (process stays away
    // from zero; equivalently the transition density is bounded at the origin).
    bool feller_satisfied() const { return 2.0 * kappa * theta >= sigma * sigma; }
    // The weaker form kappa*theta >= sigma^2 some texts quote; exposed for
    // diagnostics only, nothing in the library branches on it.
    bool feller_paper_form() const { return kappa * theta >= sigma * sigma; }

    // Throws std::invalid_argument when outside the admissible domain
    // (v0 >= 0, kappa > 0, theta > 0, sigma > 0, |rho| <= 1).
    void validate() const;
};

// Flat-curve market conventions shared by all pricers. delta is the VIX tenor
// (30 days ACT/365); r/q drive the asset forward; r_C is the discounting rate
// of the pricing PDE (zero throughout the reproduced tables).
struct MarketConvention {
    double delta = 30.0 / 365.0;  // VIX window as a year fraction
    double r = 0.0;               // growth rate
    double q = 0.0;               // dividend yield
    double r_C = 0.0;             // PDE discounting rate

    double discount_factor(double T) const;  // exp(-r_C*T), T >= 0
};

// Exact CIR transition over a horizon tau:
//   v(t+tau) = c1 * Z,  Z ~ noncentral chi^2(d, lambda_of(v(t))).
// c1 = sigma^2 (1-e^{-kappa tau}) / (4 kappa), d = 4 kappa theta / sigma^2,
// lambda(v) = 4 kappa e^{-kappa tau} v / (sigma^2 (1-e^{-kappa tau})).
struct CirTransition {
    double c1;
    double d;
    double lambda_scale;  // lambda_of(v) = lambda_scale * v

    double lambda_of(double v) const { return lambda_scale * v; }
};

// B(tau) = (1 - e^{-kappa tau})/(kappa tau), the weight of the running variance
// in the 30-day expected variance. Series expansion below kappa*tau = 1e-8
// guards the 0/0 limit (B -> 1 - kappa*tau/2).
double variance_weight(double kappa, double tau);

// Expected average variance over [t, t+tau] given v(t) = v:
//   VIX_H^2(v, tau) = (1 - B) theta + B v.
// Affine and strictly increasing in v; this is the model's "VIX squared".
double vix_squared_heston(double v, double tau, const HestonParams& params);

// E[v(t+tau) | v(t) = v_t] = theta + (v_t - theta) e^{-kappa tau}.
double expected_variance(const HestonParams& params, double v_t, double tau);

// The paper's closed-form proxy for E[v(t+tau)^2]:
//   (sigma^2/(2 kappa) + theta + e^{-kappa tau}(v0 - theta - sigma^2/(2 kappa)))^2.
// As printed the transient reads (sigma^2/(2k) + theta - v0); that sign fails to
// reproduce the published "Simple" VVIX column, so the flipped transient is used
// (see exact_second_moment_cir for the true moment). Starts from params.v0.
double second_moment_variance_paper(const HestonParams& params, double tau);

// Exact CIR second moment E[v(t+tau)^2 | v_t] = Var + Mean^2 with
//   Var = v_t sigma^2/kappa e^{-kt}(1-e^{-kt}) + theta sigma^2/(2 kappa) (1-e^{-kt})^2.
double exact_second_moment_cir(const HestonParams& params, double v_t, double tau);

// Transition machinery for a horizon tau > 0.
CirTransition cir_transition(const HestonParams& params, double tau);

// The six calibrated parameter sets of the reference tables (set1..set6).
// index is 1-based; throws std::out_of_range otherwise.
HestonParams preset_params(std::size_t index);
HestonParams preset_params(const std::string& name);  // "set1".."set6"
constexpr std::size_t kNumPresets = 6;

}  // namespace vvix
