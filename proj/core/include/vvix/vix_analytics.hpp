#pragma once

#include <stdexcept>

#include "vvix/heston.hpp"

// Closed-form and single-integral VIX/VVIX quantities under the exact CIR
// transition law: VIX futures, VIX options, the log-contract VVIX, and a
// moment-matching approximation that needs no integration at all.

namespace vvix {

// A volatility-index level in CBOE points (100x annualized volatility),
// together with the horizon it refers to.
struct IndexQuote {
    double points;
    double tenor;
};

// Root-bracketing failures of solve_sigma_for_vvix.
struct NoBracketError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonMonotoneError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// VIX future F(t,T) = 100 E[sqrt(VIX_H^2(v_T, delta))]: the expectation of the
// 30-day index level over the exact variance transition to T.
IndexQuote vix_future(const HestonParams& params, double T, const MarketConvention& conv = {});

// Undiscounted VIX option (eta=+1 call, eta=-1 put) with strike in points.
// The integral is split at the kink where the payoff leaves intrinsic-zero
// territory so each panel is smooth.
double vix_option(const HestonParams& params, double strike, double T, int eta,
                  const MarketConvention& conv = {});

// Log-contract VVIX: 100 sqrt(-(2/T) E[ln(F_T/F_0)]) with F the VIX future.
// The expectation is a single integral against the transition density.
IndexQuote vvix_log_contract(const HestonParams& params, double T,
                             const MarketConvention& conv = {});

// Moment-matching "simple" VVIX: Taylor variance of the index from the first
// two closed-form variance moments (the proxy second moment, matching the
// published column), then a lognormal back-out. No numerical integration.
IndexQuote vvix_simple(const HestonParams& params, double T, const MarketConvention& conv = {});

// Inverts vvix_simple in the vol-of-vol: returns sigma in [1e-4, 20] such
// that vvix_simple(params with sigma) hits target_points. Safeguarded Newton
// with a monotonicity pre-check on the bracket; throws NoBracketError or
// NonMonotoneError when the target is unreachable.
double solve_sigma_for_vvix(double target_points, const HestonParams& others, double T,
                            const MarketConvention& conv = {});

}  // namespace vvix
