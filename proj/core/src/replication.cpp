#include "vvix/replication.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace vvix {
namespace {

std::vector<double> strip_weights(const std::vector<double>& strikes) {
    const std::size_t n = strikes.size();
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double hi = i + 1 < n ? strikes[i + 1] : strikes[i];
        const double lo = i > 0 ? strikes[i - 1] : strikes[i];
        const double dk = (i == 0 || i + 1 == n) ? hi - lo : 0.5 * (hi - lo);
        w[i] = dk / (2.0 * strikes[i] * strikes[i]);
    }
    return w;
}

}  // namespace

StrikeGrid make_strike_grid(double k1, double kmax, double dk) {
    if (!(k1 > 0.0) || !(dk > 0.0) || !(kmax > k1))
        throw std::invalid_argument("make_strike_grid: need 0 < k1 < kmax and dk > 0");
    StrikeGrid grid;
    // snap tolerance so kmax lands on the ladder despite binary rounding
    const auto count = static_cast<std::size_t>(std::floor((kmax - k1) / dk + 1e-9)) + 1;
    if (count < 3) throw std::invalid_argument("make_strike_grid: fewer than three strikes");
    grid.strikes.reserve(count);
    for (std::size_t i = 0; i < count; ++i) grid.strikes.push_back(k1 + dk * i);
    grid.weights = strip_weights(grid.strikes);
    return grid;
}

StrikeGrid default_vix_option_grid(double k1) { return make_strike_grid(k1, 150.0, 0.5); }

VarStripResult strip_variance(double forward, const StrikeGrid& grid,
                              const std::vector<double>& otm_prices, double tenor,
                              bool allow_no_k_star) {
    const std::size_t n = grid.strikes.size();
    if (n < 3) throw std::invalid_argument("strip_variance: need at least three strikes");
    if (grid.weights.size() != n || otm_prices.size() != n)
        throw std::invalid_argument("strip_variance: weights/prices do not match the strikes");
    if (!(forward > 0.0)) throw std::invalid_argument("strip_variance: forward must be positive");
    if (!(tenor > 0.0)) throw std::invalid_argument("strip_variance: tenor must be positive");

    VarStripResult out{};
    // K*: largest strike at or below the forward.
    auto above = std::upper_bound(grid.strikes.begin(), grid.strikes.end(), forward);
    if (above == grid.strikes.begin()) {
        if (!allow_no_k_star)
            throw NoKStarError("strip_variance: forward " + std::to_string(forward) +
                               " below the lowest strike " + std::to_string(grid.strikes.front()));
        out.k_star_fallback = true;
        out.k_star = grid.strikes.front();
    } else {
        out.k_star = *(above - 1);
    }

    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += grid.weights[i] * otm_prices[i];
    const double raw = 4.0 * sum - (forward / out.k_star - 1.0) * (forward / out.k_star - 1.0);

    out.floored = raw < 0.0;
    out.variance = std::max(raw, 0.0) / tenor;
    out.vix_points = 100.0 * std::sqrt(out.variance);
    out.lowest_contribution = 4.0 * grid.weights.front() * otm_prices.front();
    out.highest_contribution = 4.0 * grid.weights.back() * otm_prices.back();
    return out;
}

IndexQuote vvix_by_replication(const HestonParams& params, double T, const MarketConvention& conv,
                               const StrikeGrid& vix_grid) {
    const double forward = vix_future(params, T, conv).points;

    // Puts below K*, calls above it, and the call/put average at K* itself —
    // the CBOE convention for the boundary strike, K* being the largest
    // strike at or below the forward (fall back to the lowest strike when
    // the whole grid sits above the forward, matching strip_variance).
    auto above = std::upper_bound(vix_grid.strikes.begin(), vix_grid.strikes.end(), forward);
    const bool genuine_k_star = above != vix_grid.strikes.begin();
    const double k_star = genuine_k_star ? *(above - 1) : vix_grid.strikes.front();

    std::vector<double> otm(vix_grid.strikes.size());
    for (std::size_t i = 0; i < otm.size(); ++i) {
        const double strike = vix_grid.strikes[i];
        if (genuine_k_star && strike == k_star) {
            otm[i] = 0.5 * (vix_option(params, strike, T, +1, conv) +
                            vix_option(params, strike, T, -1, conv));
        } else {
            const int eta = strike < k_star ? -1 : +1;
            otm[i] = vix_option(params, strike, T, eta, conv);
        }
    }
    const VarStripResult strip = strip_variance(forward, vix_grid, otm, T);
    return {strip.vix_points, T};
}

}  // namespace vvix
