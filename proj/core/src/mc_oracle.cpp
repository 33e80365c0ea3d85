#include "vvix/mc_oracle.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "vvix/sampling.hpp"

namespace vvix {
namespace {

struct TerminalSampler {
    CirTransition trans;
    double lambda;
    const HestonParams* params;
    const MarketConvention* conv;
    std::mt19937_64 rng;

    double draw_vix_points() {
        const double v_t = trans.c1 * ncx2_sample(trans.d, lambda, rng);
        return 100.0 * std::sqrt(vix_squared_heston(v_t, conv->delta, *params));
    }
};

TerminalSampler make_sampler(const HestonParams& params, double T, const MarketConvention& conv,
                             std::size_t n_paths, std::uint64_t seed) {
    params.validate();
    if (!(T > 0.0)) throw std::invalid_argument("mc oracle: T must be positive");
    if (n_paths < 1000) throw std::invalid_argument("mc oracle: need at least 1000 paths");
    TerminalSampler s{cir_transition(params, T), 0.0, &params, &conv, std::mt19937_64(seed)};
    s.lambda = s.trans.lambda_of(params.v0);
    return s;
}

}  // namespace

McEstimate mc_vix_future(const HestonParams& params, double T, const MarketConvention& conv,
                         std::size_t n_paths, std::uint64_t seed) {
    TerminalSampler s = make_sampler(params, T, conv, n_paths, seed);
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < n_paths; ++i) {
        const double x = s.draw_vix_points();
        sum += x;
        sum_sq += x * x;
    }
    const double n = static_cast<double>(n_paths);
    const double mean = sum / n;
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    return {mean, std::sqrt(var / n), n_paths, seed};
}

McEstimate mc_vvix_log(const HestonParams& params, double T, const MarketConvention& conv,
                       std::size_t n_paths, std::uint64_t seed) {
    TerminalSampler s = make_sampler(params, T, conv, n_paths, seed);
    // x = VIX_T/100 and y = ln(VIX_T/100); the estimator couples both sample
    // means, so track their full 2x2 sample covariance.
    double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n_paths; ++i) {
        const double x = s.draw_vix_points() / 100.0;
        const double y = std::log(x);
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }
    const double n = static_cast<double>(n_paths);
    const double mx = sx / n, my = sy / n;
    const double var_x = std::max(0.0, (sxx - n * mx * mx) / (n - 1.0));
    const double var_y = std::max(0.0, (syy - n * my * my) / (n - 1.0));
    const double cov_xy = (sxy - n * mx * my) / (n - 1.0);

    const double vvix_sq = -2.0 / T * (my - std::log(mx));
    if (vvix_sq <= 0.0)
        throw std::runtime_error("mc_vvix_log: nonpositive variance estimate " +
                                 std::to_string(vvix_sq));
    const double points = 100.0 * std::sqrt(vvix_sq);

    // Delta method on g(my, mx) = 100 sqrt((2/T)(ln mx - my)).
    const double dy = -100.0 / (T * std::sqrt(vvix_sq));
    const double dx = 100.0 / (T * mx * std::sqrt(vvix_sq));
    const double var_g = (dy * dy * var_y + dx * dx * var_x + 2.0 * dx * dy * cov_xy) / n;
    return {points, std::sqrt(std::max(0.0, var_g)), n_paths, seed};
}

McEstimate mc_vix_option(const HestonParams& params, double strike, double T, int eta,
                         const MarketConvention& conv, std::size_t n_paths, std::uint64_t seed) {
    if (!(strike >= 0.0)) throw std::invalid_argument("mc_vix_option: strike must be nonnegative");
    if (eta != 1 && eta != -1) throw std::invalid_argument("mc_vix_option: eta must be +1 or -1");
    TerminalSampler s = make_sampler(params, T, conv, n_paths, seed);
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < n_paths; ++i) {
        const double payoff = std::max(eta * (s.draw_vix_points() - strike), 0.0);
        sum += payoff;
        sum_sq += payoff * payoff;
    }
    const double n = static_cast<double>(n_paths);
    const double mean = sum / n;
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    return {mean, std::sqrt(var / n), n_paths, seed};
}

}  // namespace vvix
