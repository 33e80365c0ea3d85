#pragma once

#include <cstddef>
#include <vector>

#include "vvix/heston.hpp"
#include "vvix/replication.hpp"
#include "vvix/vix_analytics.hpp"

// Full two-dimensional Heston PDE valuation of the VVIX by double
// replication: evolve a stack of SPX option surfaces backward from T+delta
// to T, convert them at T into VIX option payoffs through the parity/strip
// continuity condition, evolve those to 0, and read the VVIX off a second
// strip plus a bicubic spline at (spot, v0).

namespace vvix {

// Uniform tensor grid over [0, x_max] x [0, v_max]. x_max covers
// x_max_stddevs standard deviations of the long-run volatility over the full
// horizon; v_max covers five times the larger of theta and v0.
struct PdeGrid {
    std::vector<double> x_nodes;  // M+1 ascending, x_nodes[0] = 0
    std::vector<double> v_nodes;  // L+1 ascending, v_nodes[0] = 0
    int n_steps;                  // N, the total step budget over [0, T+delta]
    double x_max_stddevs;
    double spot;

    std::size_t nx() const { return x_nodes.size(); }
    std::size_t nv() const { return v_nodes.size(); }
    double dx() const { return x_nodes[1] - x_nodes[0]; }
    double dv() const { return v_nodes[1] - v_nodes[0]; }
};

// 2n value surfaces over the grid: the first n are calls, the next n puts,
// at strikes[0..n). Each surface is row-major with v as the slow index:
// surface[j * nx + i] is the value at (x_i, v_j).
struct PayoffStack {
    std::vector<double> strikes;
    std::size_t nx = 0;
    std::size_t nv = 0;
    std::vector<std::vector<double>> surfaces;
    double payoff_bound = 0.0;  // max |initial payoff|, for the blow-up detector

    std::size_t node_count() const { return nx * nv; }
};

// Forward and strip results at every grid node (the shared machinery of the
// continuity condition and the final readout).
struct NodeStripResult {
    std::vector<double> forward;     // per node, regression intercept
    std::vector<double> index_pts;   // per node, 100*sqrt(strip variance)
    int no_k_star_nodes = 0;         // nodes where the forward fell below the grid
};

// Diagnostics of a full pde_vvix run.
struct PdeRunInfo {
    int stages_leg1 = 0;
    int stages_leg2 = 0;
    double spectral_bound = 0.0;
    int no_k_star_continuity = 0;
    int no_k_star_readout = 0;
};

PdeGrid build_grid(const HestonParams& params, const MarketConvention& conv, int M, int L, int N,
                   double spot, double x_max_stddevs = 6.0);

// Fresh stack of call/put intrinsic surfaces at the given strikes.
PayoffStack apply_initial_condition(const PdeGrid& grid, const std::vector<double>& strikes);

// Advances every surface from t_from back to t_to (t_from > t_to) in n_steps
// equal super-time-stepped explicit steps; the internal stage count per step
// is chosen so the scheme's real-stability interval covers dt times a
// Gershgorin bound of the discrete operator. Returns the stage count used.
// Throws when any surface exceeds 10x the stack's payoff bound.
int rkg_evolve(PayoffStack& stack, const PdeGrid& grid, const HestonParams& params,
               const MarketConvention& conv, double t_from, double t_to, int n_steps);

// Per-node parity regression + variance strip over the stack's strikes.
NodeStripResult node_strip(const PayoffStack& stack, const PdeGrid& grid, const StrikeGrid& grid_k,
                           double tenor);

// The t = T transformation: per node, imply the forward from call-put parity
// across the SPX strikes, run the variance strip to get a VIX level, and
// rebuild the stack as VIX option payoffs on vix_grid.
PayoffStack continuity_condition(const PayoffStack& stack, const PdeGrid& grid,
                                 const StrikeGrid& spx_grid, const StrikeGrid& vix_grid,
                                 const MarketConvention& conv, PdeRunInfo* info = nullptr);

// Full double-replication pipeline at tenor T = conv.delta.
IndexQuote pde_vvix(const HestonParams& params, const MarketConvention& conv, double spot, int M,
                    int L, int N, const StrikeGrid& spx_grid, const StrikeGrid& vix_grid,
                    PdeRunInfo* info = nullptr);

// SPX replication ladder used by the pipeline: `count` uniform strikes from
// 40% to 140% of the spot. The strip's discretization error in the variance
// aggregate grows like dK^2/K*^2 and is worst where instantaneous variance is
// small (the curvature of the option profile concentrates near the forward),
// so the default resolution is chosen fine enough that halving dK moves the
// resulting VVIX by well under half an index point.
StrikeGrid default_spx_strip(double spot, std::size_t count = 200);

}  // namespace vvix
