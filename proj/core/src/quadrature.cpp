#include "vvix/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace vvix {
namespace {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK constants).
// Nodes are the positive half; the rule is symmetric about the midpoint.
constexpr int kNodes = 8;
constexpr double kXgk[kNodes] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kWgk[kNodes] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
// 7-point Gauss weights aligned with the odd Kronrod nodes (indices 1,3,5,7).
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct PanelResult {
    double integral;
    double error;
};

// One Gauss-Kronrod pass over [lo, hi]; the error estimate is the QUADPACK
// scaled difference between the Kronrod and embedded Gauss results.
PanelResult gk15(const std::function<double(double)>& f, double lo, double hi) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);

    double fv[kNodes][2];
    for (int j = 0; j < kNodes; ++j) {
        fv[j][0] = f(center - half * kXgk[j]);
        fv[j][1] = (j == kNodes - 1) ? fv[j][0] : f(center + half * kXgk[j]);
        if (std::isnan(fv[j][0]) || std::isnan(fv[j][1]))
            throw std::runtime_error("integrate: integrand returned NaN in [" +
                                     std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }

    double result_kronrod = kWgk[kNodes - 1] * fv[kNodes - 1][0];
    double result_gauss = kWg[3] * fv[kNodes - 1][0];
    double result_abs = std::abs(result_kronrod);
    for (int j = 0; j < kNodes - 1; ++j) {
        const double sum = fv[j][0] + fv[j][1];
        result_kronrod += kWgk[j] * sum;
        if (j % 2 == 1) result_gauss += kWg[j / 2] * sum;
        result_abs += kWgk[j] * (std::abs(fv[j][0]) + std::abs(fv[j][1]));
    }

    const double mean = 0.5 * result_kronrod;
    double result_asc = kWgk[kNodes - 1] * std::abs(fv[kNodes - 1][0] - mean);
    for (int j = 0; j < kNodes - 1; ++j)
        result_asc += kWgk[j] * (std::abs(fv[j][0] - mean) + std::abs(fv[j][1] - mean));

    result_kronrod *= half;
    result_gauss *= half;
    result_abs *= std::abs(half);
    result_asc *= std::abs(half);

    double err = std::abs(result_kronrod - result_gauss);
    if (result_asc != 0.0 && err != 0.0)
        err = result_asc * std::min(1.0, std::pow(200.0 * err / result_asc, 1.5));
    const double eps50 = 50.0 * std::numeric_limits<double>::epsilon();
    if (result_abs > std::numeric_limits<double>::min() / eps50)
        err = std::max(err, eps50 * result_abs);
    return {result_kronrod, err};
}

struct Interval {
    double lo, hi;
    double integral;
    double error;
};

// Globally adaptive refinement: repeatedly split the interval carrying the
// largest error estimate. The final sum runs left-to-right so the result does
// not depend on the refinement history.
double adapt(const std::function<double(double)>& f, double lo, double hi,
             const QuadratureSpec& spec) {
    std::vector<Interval> panels;
    panels.reserve(64);
    PanelResult first = gk15(f, lo, hi);
    panels.push_back({lo, hi, first.integral, first.error});

    auto total = [&panels]() {
        double integral = 0.0, error = 0.0;
        for (const Interval& p : panels) {
            integral += p.integral;
            error += p.error;
        }
        return PanelResult{integral, error};
    };

    while (true) {
        PanelResult t = total();
        const double tol = std::max(spec.abs_tol, spec.rel_tol * std::abs(t.integral));
        if (t.error <= tol) break;
        if (static_cast<int>(panels.size()) >= spec.max_subdivisions)
            throw QuadratureNonConvergence(
                "integrate: tolerance not reached within max_subdivisions", t.integral, t.error);

        std::size_t worst = 0;
        for (std::size_t i = 1; i < panels.size(); ++i)
            if (panels[i].error > panels[worst].error) worst = i;

        const Interval split = panels[worst];
        const double mid = 0.5 * (split.lo + split.hi);
        if (!(split.lo < mid && mid < split.hi))
            throw QuadratureNonConvergence(
                "integrate: interval could not be subdivided further", t.integral, t.error);
        PanelResult left = gk15(f, split.lo, mid);
        PanelResult right = gk15(f, mid, split.hi);
        panels[worst] = {split.lo, mid, left.integral, left.error};
        panels.push_back({mid, split.hi, right.integral, right.error});
    }

    std::sort(panels.begin(), panels.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    double result = 0.0;
    for (const Interval& p : panels) result += p.integral;
    return result;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec) {
    if (std::isnan(a) || std::isnan(b)) throw std::invalid_argument("integrate: NaN bound");
    if (b == a) return 0.0;
    if (b < a) throw std::invalid_argument("integrate: b < a");

    if (std::isinf(b)) {
        // Map [a, inf) through z = a + u/(1-u); the Jacobian 1/(1-u)^2 keeps
        // the transformed integrand finite because f must decay superlinearly.
        auto mapped = [&f, a](double u) {
            const double om = 1.0 - u;
            return f(a + u / om) / (om * om);
        };
        QuadratureSpec inner = spec;
        inner.left_singularity = false;
        if (spec.left_singularity) {
            // Handle the singular first panel in the original variable, then
            // map the rest.
            const double eps = spec.left_epsilon;
            if (!(eps > 0.0)) throw std::invalid_argument("integrate: left_epsilon must be > 0");
            QuadratureSpec head = spec;
            double head_part = integrate(f, a, a + eps, head);
            const double u0 = eps / (1.0 + eps);  // u with a + u/(1-u) = a + eps
            return head_part + adapt(mapped, u0, 1.0, inner);
        }
        return adapt(mapped, 0.0, 1.0, inner);
    }

    if (spec.left_singularity) {
        const double d = spec.singularity_dof;
        if (!(d > 0.0)) throw std::invalid_argument("integrate: singularity_dof must be > 0");
        double eps = spec.left_epsilon;
        if (!(eps > 0.0)) eps = 0.125 * (b - a);
        eps = std::min(eps, b - a);
        // z = a + s^{2/d}: the (z-a)^{d/2-1} blow-up becomes a bounded factor.
        const double p = 2.0 / d;
        auto desingularized = [&f, a, p](double s) {
            return f(a + std::pow(s, p)) * p * std::pow(s, p - 1.0);
        };
        const double s_hi = std::pow(eps, 1.0 / p);
        QuadratureSpec inner = spec;
        inner.left_singularity = false;
        double head = adapt(desingularized, 0.0, s_hi, inner);
        if (eps >= b - a) return head;
        return head + adapt(f, a + eps, b, inner);
    }

    return adapt(f, a, b, spec);
}

}  // namespace vvix
