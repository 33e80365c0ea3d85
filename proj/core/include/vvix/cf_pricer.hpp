#pragma once

#include "vvix/heston.hpp"

// Continuum European pricing: the Heston characteristic-function integral,
// the Black formula family, and the implied-volatility inversion. All prices
// here are undiscounted (forward-measure) unless a discount is passed in.

namespace vvix {

// Undiscounted Black price on the forward: eta=+1 call, eta=-1 put.
double black_price(double forward, double strike, double T, double vol, int eta);

// Vega of the discounted Black price:
//   B * F * phi(ln(F/K)/(sigma sqrt(T)) + sigma sqrt(T)/2) * sqrt(T).
double bs_vega(double forward, double strike, double T, double sigma_impl, double discount);

// Black implied volatility from an undiscounted price, by bisection.
double implied_vol_black(double forward, double strike, double T, double price, int eta);

// Undiscounted European option under Heston, by a single characteristic-
// function integral along the half-line shifted into the strip of analyticity
// (no cancellation between probability terms). Accuracy ~1e-8 relative for
// quotes away from degenerate corners; put obtained via parity.
double heston_vanilla_price(const HestonParams& params, const MarketConvention& conv, double spot,
                            double strike, double T, bool is_call);

}  // namespace vvix
