#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "vvix/heston.hpp"

// Heston calibration to vanilla quotes: weighted OTM least squares, global
// search (differential evolution) seeding a damped Gauss-Newton polish, and
// two ways of anchoring the fit to a VVIX level — an extra penalty residual,
// or eliminating the vol-of-vol by solving for it at every evaluation.

namespace vvix {

struct VanillaQuote {
    double maturity;
    double strike;
    bool is_call;
    double price;  // discounted market price
    double implied_vol = std::numeric_limits<double>::quiet_NaN();  // optional
    double discount = 1.0;                                          // B(0,T)
};

enum class WeightKind { kUniform, kInverseDiscount, kInverseVega };

struct WeightScheme {
    WeightKind kind = WeightKind::kUniform;
    double vega_floor = 1e-2;
    // The printed rule 1/min(floor, vega) amplifies small-vega quotes instead
    // of relaxing them; kept available for study, off by default in favor of
    // the floor semantics 1/max(vega, floor).
    bool amplify_small_vegas = false;
};

enum class VvixMode { kNone, kPenalty, kSolve };
enum class VvixModel { kLogContract, kSimple };

struct CalibrationSpec {
    std::vector<VanillaQuote> quotes;
    WeightScheme scheme;
    double spot = 100.0;
    MarketConvention conv;

    VvixMode vvix_mode = VvixMode::kNone;
    VvixModel vvix_model = VvixModel::kLogContract;  // model behind the anchor
    double vvix_target = 0.0;                        // points
    double vvix_weight = 0.0;                        // penalty weight
    double vvix_tenor = 30.0 / 365.0;

    std::optional<double> fixed_kappa;
    std::optional<double> fixed_theta;

    int de_population = 30;
    int de_generations = 200;
    std::uint64_t de_seed = 42;
    int gn_max_iterations = 200;
    double gn_step_tol = 1e-10;
    double gn_objective_tol = 1e-12;
};

struct CalibrationResult {
    HestonParams params;
    double objective;
    bool converged;
    int gn_iterations;
    std::vector<double> residuals;  // weighted, per quote (+ penalty last)
    std::size_t decision_dimension;
    std::size_t objective_evaluations;
    // VVIX diagnostics evaluated at the solution
    double vvix_simple_points;
    double vvix_log_points;
    double vvix_replication_points;
};

// Per-quote weights for the chosen scheme. Inverse-vega requires implied
// vols on every quote (error otherwise) and applies the floor (or the
// printed amplifying rule when the study flag is set).
std::vector<double> build_weights(const std::vector<VanillaQuote>& quotes,
                                  const WeightScheme& scheme, double spot,
                                  const MarketConvention& conv);

// Full calibration: DE global stage, then damped Gauss-Newton with a central-
// difference Jacobian. Bounds: v0, theta in [1e-4, 2], kappa in [1e-3, 20],
// rho in [-0.999, 0.999], sigma in [1e-3, 10]. Non-convergence returns the
// best point found with converged=false rather than throwing.
CalibrationResult calibrate(const CalibrationSpec& spec);

}  // namespace vvix
