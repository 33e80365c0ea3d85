#pragma once

#include <cstddef>
#include <cstdint>

#include "vvix/heston.hpp"

// Independent Monte Carlo checks of the single-integral quantities. Sampling
// is exact (terminal draw from the CIR transition law), so estimates carry no
// discretization bias — only the reported statistical error.

namespace vvix {

struct McEstimate {
    double mean;
    double std_error;
    std::size_t n_paths;
    std::uint64_t seed;
};

// Average of 100*sqrt(VIX_H^2(v_T, delta)) over exact terminal draws.
McEstimate mc_vix_future(const HestonParams& params, double T, const MarketConvention& conv,
                         std::size_t n_paths, std::uint64_t seed);

// Log-contract VVIX estimate: -(2/T) (mean ln VIX_T - ln mean VIX_T),
// reported as 100*sqrt(.) with a delta-method standard error that accounts
// for the correlation between the two sample means.
McEstimate mc_vvix_log(const HestonParams& params, double T, const MarketConvention& conv,
                       std::size_t n_paths, std::uint64_t seed);

// Undiscounted VIX option (eta=+1 call, eta=-1 put), strike in points.
McEstimate mc_vix_option(const HestonParams& params, double strike, double T, int eta,
                         const MarketConvention& conv, std::size_t n_paths, std::uint64_t seed);

}  // namespace vvix
