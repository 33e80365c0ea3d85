#include "vvix/heston.hpp"

#include <cmath>
#include <stdexcept>

namespace vvix {

void HestonParams::validate() const {
    if (!(v0 >= 0.0)) throw std::invalid_argument("HestonParams: v0 must be >= 0");
    if (!(kappa > 0.0)) throw std::invalid_argument("HestonParams: kappa must be > 0");
    if (!(theta > 0.0)) throw std::invalid_argument("HestonParams: theta must be > 0");
    if (!(sigma > 0.0)) throw std::invalid_argument("HestonParams: sigma must be > 0");
    if (!(rho >= -1.0 && rho <= 1.0)) throw std::invalid_argument("HestonParams: rho must lie in [-1, 1]");
}

double MarketConvention::discount_factor(double T) const {
    if (T < 0.0) throw std::invalid_argument("discount_factor: negative horizon");
    return std::exp(-r_C * T);
}

double variance_weight(double kappa, double tau) {
    const double kt = kappa * tau;
    // (1 - e^{-x})/x -> 1 - x/2 + x^2/6; switch before the subtraction cancels.
    if (kt < 1e-8) return 1.0 - 0.5 * kt + kt * kt / 6.0;
    return -std::expm1(-kt) / kt;
}

double vix_squared_heston(double v, double tau, const HestonParams& params) {
    params.validate();
    if (!(tau > 0.0)) throw std::domain_error("vix_squared_heston: tau must be > 0");
    if (!(v >= 0.0)) throw std::domain_error("vix_squared_heston: v must be >= 0");
    const double b = variance_weight(params.kappa, tau);
    return (1.0 - b) * params.theta + b * v;
}

double expected_variance(const HestonParams& params, double v_t, double tau) {
    params.validate();
    if (tau < 0.0) throw std::domain_error("expected_variance: tau must be >= 0");
    return params.theta + (v_t - params.theta) * std::exp(-params.kappa * tau);
}

double second_moment_variance_paper(const HestonParams& params, double tau) {
    params.validate();
    if (tau < 0.0) throw std::domain_error("second_moment_variance_paper: tau must be >= 0");
    const double a = params.sigma * params.sigma / (2.0 * params.kappa) + params.theta;
    const double root = a + std::exp(-params.kappa * tau) * (params.v0 - a);
    return root * root;
}

double exact_second_moment_cir(const HestonParams& params, double v_t, double tau) {
    params.validate();
    if (tau < 0.0) throw std::domain_error("exact_second_moment_cir: tau must be >= 0");
    const double e = std::exp(-params.kappa * tau);
    const double one_me = -std::expm1(-params.kappa * tau);
    const double s2k = params.sigma * params.sigma / params.kappa;
    const double var = v_t * s2k * e * one_me + params.theta * 0.5 * s2k * one_me * one_me;
    const double mean = expected_variance(params, v_t, tau);
    return var + mean * mean;
}

CirTransition cir_transition(const HestonParams& params, double tau) {
    params.validate();
    if (!(tau > 0.0)) throw std::domain_error("cir_transition: tau must be > 0");
    const double one_me = -std::expm1(-params.kappa * tau);
    const double sigma2 = params.sigma * params.sigma;
    CirTransition t;
    t.c1 = sigma2 * one_me / (4.0 * params.kappa);
    t.d = 4.0 * params.kappa * params.theta / sigma2;
    t.lambda_scale = 4.0 * params.kappa * std::exp(-params.kappa * tau) / (sigma2 * one_me);
    return t;
}

HestonParams preset_params(std::size_t index) {
    // Calibrations of the reference tables: sets 1-3 fit the 2024-10-08 SPX
    // surface (equal weights / inverse vega, kappa fixed at 0.75 / inverse
    // vega), sets 4-6 the 2021-03-15 surface in the same order.
    static constexpr std::array<HestonParams, kNumPresets> kSets{{
        {0.0236, 0.2575, 0.0849, -0.7513, 0.3150},
        {0.0313, 0.7500, 0.0678, -0.7663, 0.7593},
        {0.0371, 3.4490, 0.0497, -0.7558, 1.7522},
        {0.0538, 0.6431, 0.0880, -0.7010, 0.6159},
        {0.0440, 0.7500, 0.0998, -0.7410, 0.7654},
        {0.0397, 4.6705, 0.0696, -0.7149, 2.0640},
    }};
    if (index < 1 || index > kNumPresets) throw std::out_of_range("preset_params: index must be 1..6");
    return kSets[index - 1];
}

HestonParams preset_params(const std::string& name) {
    if (name.size() == 4 && name.compare(0, 3, "set") == 0 && name[3] >= '1' && name[3] <= '6')
        return preset_params(static_cast<std::size_t>(name[3] - '0'));
    throw std::out_of_range("preset_params: unknown preset '" + name + "' (expected set1..set6)");
}

}  // namespace vvix
