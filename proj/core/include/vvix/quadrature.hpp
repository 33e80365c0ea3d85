#pragma once

#include <functional>
#include <limits>
#include <stdexcept>

// Adaptive Gauss-Kronrod (15-point) quadrature with explicit support for the
// two awkward shapes in this library: semi-infinite CIR expectations and
// integrands with an integrable power singularity at the left endpoint
// (the z^{d/2-1} explosion of the noncentral chi-squared density when d < 2).

namespace vvix {

struct QuadratureSpec {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    int max_subdivisions = 200;

    // When set, the integrand may diverge integrably at the left endpoint a
    // like (z-a)^{singularity_dof/2 - 1}. The first panel [a, a+left_epsilon]
    // is then computed under the substitution z = a + s^{2/d}, which makes the
    // transformed integrand bounded at 0. Callers pick left_epsilon on the
    // scale of the 0.1% quantile of the underlying density.
    bool left_singularity = false;
    double singularity_dof = 1.0;
    double left_epsilon = 0.0;
};

// Tolerance could not be met within max_subdivisions; carries the best
// estimate and the achieved error bound so callers may decide to proceed.
struct QuadratureNonConvergence : std::runtime_error {
    QuadratureNonConvergence(const std::string& what, double estimate_, double error_bound_)
        : std::runtime_error(what), estimate(estimate_), error_bound(error_bound_) {}
    double estimate;
    double error_bound;
};

inline constexpr double kInfiniteBound = std::numeric_limits<double>::infinity();

// Integrate f over [a, b]; b may be kInfiniteBound, in which case the range is
// mapped through z = a + u/(1-u). Deterministic: identical inputs give
// bit-identical results. Throws QuadratureNonConvergence per the spec above and
// std::runtime_error if the integrand returns NaN.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec = {});

}  // namespace vvix
