#pragma once

#include <stdexcept>
#include <vector>

#include "vvix/heston.hpp"
#include "vvix/vix_analytics.hpp"

// Discrete variance-strip machinery in the style of the CBOE methodology:
// strike grids with quadrature weights, K* selection, and the strip estimator
// for both the VIX (on SPX options) and the VVIX (on VIX options).

namespace vvix {

// Ascending strike ladder with per-strike quadrature weights
// w_i = dK_i / (2 K_i^2), where dK_i is the central strike spacing in the
// interior and the one-sided difference at the ends. The strip aggregates
// 2 sum(dK_i/K_i^2) V_i = 4 sum(w_i V_i), which is the constant the
// log-contract limit requires.
struct StrikeGrid {
    std::vector<double> strikes;
    std::vector<double> weights;
};

// Thrown when the forward lies below the lowest strike and no fallback was
// requested: no strike qualifies as K*.
struct NoKStarError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct VarStripResult {
    double variance;    // annualized
    double vix_points;  // 100 sqrt(variance)
    double k_star;      // largest strike at or below the forward
    bool floored;       // raw strip went negative and was floored at zero
    bool k_star_fallback;          // forward < lowest strike; lowest used as K*
    double lowest_contribution;    // first strike's share of variance*tenor
    double highest_contribution;   // last strike's share (truncation diagnostics)
};

// Uniform grid from k1 to kmax (inclusive when it lands on the step) with
// spacing dk, weights included.
StrikeGrid make_strike_grid(double k1, double kmax, double dk);

// The VIX-option ladder used throughout the tables: k1 to 150 in steps of 0.5.
StrikeGrid default_vix_option_grid(double k1);

// Discrete variance strip: variance*tenor = 4 sum(w_i V_i) - (F/K* - 1)^2
// with V_i the undiscounted OTM price at strikes[i] (puts below K*, calls at
// or above it). Negative raw variance is floored at zero with a flag. When
// allow_no_k_star is set, a forward below the grid uses the lowest strike as
// K* instead of throwing.
VarStripResult strip_variance(double forward, const StrikeGrid& grid,
                              const std::vector<double>& otm_prices, double tenor,
                              bool allow_no_k_star = false);

// Prices every OTM VIX option on the grid via the single-integral pricer,
// then runs the strip against the VIX future.
IndexQuote vvix_by_replication(const HestonParams& params, double T, const MarketConvention& conv,
                               const StrikeGrid& vix_grid);

}  // namespace vvix
