#include "vvix/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "vvix/cf_pricer.hpp"
#include "vvix/replication.hpp"
#include "vvix/vix_analytics.hpp"

namespace vvix {
namespace {

constexpr int kNumParams = 5;  // v0, kappa, theta, rho, sigma
constexpr double kLowerBounds[kNumParams] = {1e-4, 1e-3, 1e-4, -0.999, 1e-3};
constexpr double kUpperBounds[kNumParams] = {2.0, 20.0, 2.0, 0.999, 10.0};

HestonParams unpack(const double* x) { return {x[0], x[1], x[2], x[3], x[4]}; }

// Gaussian elimination with partial pivoting for the (at most 5x5) normal
// equations of the Gauss-Newton step.
std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
        if (std::abs(a[pivot * n + col]) < 1e-300)
            throw std::runtime_error("calibrate: singular Gauss-Newton system");
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a[pivot * n + c], a[col * n + c]);
            std::swap(b[pivot], b[col]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / a[col * n + col];
            for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t r = n; r-- > 0;) {
        double s = b[r];
        for (std::size_t c = r + 1; c < n; ++c) s -= a[r * n + c] * x[c];
        x[r] = s / a[r * n + r];
    }
    return x;
}

// The weighted residual vector and everything needed to evaluate it.
class Objective {
  public:
    Objective(const CalibrationSpec& spec, std::vector<double> weights)
        : spec_(spec), weights_(std::move(weights)) {
        // Decision vector: the five parameters minus exogenous fixes minus
        // (in solve mode) the vol-of-vol, which the anchor determines.
        for (int j = 0; j < kNumParams; ++j) {
            const bool fixed = (j == 1 && spec.fixed_kappa) || (j == 2 && spec.fixed_theta) ||
                               (j == 4 && spec.vvix_mode == VvixMode::kSolve);
            if (!fixed) active_.push_back(j);
        }
        full_[0] = 0.04;
        full_[1] = spec.fixed_kappa.value_or(1.0);
        full_[2] = spec.fixed_theta.value_or(0.04);
        full_[3] = 0.0;
        full_[4] = 0.5;
    }

    std::size_t dimension() const { return active_.size(); }
    std::size_t residual_count() const {
        return spec_.quotes.size() + (spec_.vvix_mode == VvixMode::kPenalty ? 1 : 0);
    }
    double lower(std::size_t i) const { return kLowerBounds[active_[i]]; }
    double upper(std::size_t i) const { return kUpperBounds[active_[i]]; }
    std::size_t evaluations() const { return evaluations_; }

    // Fills the full parameter set from the decision vector, solving for the
    // vol-of-vol when the anchor eliminates it.
    HestonParams materialize(const std::vector<double>& x) const {
        double full[kNumParams];
        std::copy(full_, full_ + kNumParams, full);
        for (std::size_t i = 0; i < active_.size(); ++i) full[active_[i]] = x[i];
        HestonParams p = unpack(full);
        if (spec_.vvix_mode == VvixMode::kSolve)
            p.sigma = solve_sigma_for_vvix(spec_.vvix_target, p, spec_.vvix_tenor, spec_.conv);
        return p;
    }

    std::vector<double> residuals(const std::vector<double>& x) const {
        ++evaluations_;
        const HestonParams p = materialize(x);
        std::vector<double> r;
        r.reserve(residual_count());
        for (std::size_t i = 0; i < spec_.quotes.size(); ++i) {
            const VanillaQuote& q = spec_.quotes[i];
            const double fwd = spec_.spot * std::exp((spec_.conv.r - spec_.conv.q) * q.maturity);
            const bool otm_call = q.strike >= fwd;
            // move the market quote to the OTM side via parity before fitting
            double market = q.price;
            if (q.is_call != otm_call) market += (otm_call ? 1.0 : -1.0) * q.discount * (fwd - q.strike);
            const double model =
                q.discount *
                heston_vanilla_price(p, spec_.conv, spec_.spot, q.strike, q.maturity, otm_call);
            r.push_back(weights_[i] * (model - market));
        }
        if (spec_.vvix_mode == VvixMode::kPenalty) {
            const double model = spec_.vvix_model == VvixModel::kLogContract
                                     ? vvix_log_contract(p, spec_.vvix_tenor, spec_.conv).points
                                     : vvix_simple(p, spec_.vvix_tenor, spec_.conv).points;
            r.push_back(spec_.vvix_weight * (model - spec_.vvix_target));
        }
        return r;
    }

    double value(const std::vector<double>& x) const {
        const std::vector<double> r = residuals(x);
        double s = 0.0;
        for (double v : r) s += v * v;
        return s;
    }

    // For the global stage: any evaluation failure just disqualifies the
    // candidate instead of aborting the search.
    double value_or_inf(const std::vector<double>& x) const {
        try {
            return value(x);
        } catch (const std::exception&) {
            return std::numeric_limits<double>::infinity();
        }
    }

  private:
    const CalibrationSpec& spec_;
    std::vector<double> weights_;
    std::vector<int> active_;
    double full_[kNumParams];
    mutable std::size_t evaluations_ = 0;
};

// Classic DE/rand/1/bin with fixed seed; bounds enforced by clipping.
std::vector<double> differential_evolution(const Objective& obj, int population, int generations,
                                           std::uint64_t seed) {
    const std::size_t dim = obj.dimension();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<std::vector<double>> pop(population, std::vector<double>(dim));
    std::vector<double> cost(population);
    for (int i = 0; i < population; ++i) {
        for (std::size_t j = 0; j < dim; ++j)
            pop[i][j] = obj.lower(j) + unit(rng) * (obj.upper(j) - obj.lower(j));
        cost[i] = obj.value_or_inf(pop[i]);
    }

    constexpr double kF = 0.8, kCr = 0.9;
    std::uniform_int_distribution<int> pick(0, population - 1);
    std::uniform_int_distribution<int> pick_dim(0, static_cast<int>(dim) - 1);
    std::vector<double> trial(dim);
    for (int gen = 0; gen < generations; ++gen) {
        for (int i = 0; i < population; ++i) {
            int a = pick(rng), b = pick(rng), c = pick(rng);
            while (a == i) a = pick(rng);
            while (b == i || b == a) b = pick(rng);
            while (c == i || c == a || c == b) c = pick(rng);
            const int forced = pick_dim(rng);
            for (std::size_t j = 0; j < dim; ++j) {
                if (static_cast<int>(j) == forced || unit(rng) < kCr) {
                    trial[j] = pop[a][j] + kF * (pop[b][j] - pop[c][j]);
                    trial[j] = std::clamp(trial[j], obj.lower(j), obj.upper(j));
                } else {
                    trial[j] = pop[i][j];
                }
            }
            const double trial_cost = obj.value_or_inf(trial);
            if (trial_cost <= cost[i]) {
                pop[i] = trial;
                cost[i] = trial_cost;
            }
        }
    }
    const std::size_t best = static_cast<std::size_t>(
        std::min_element(cost.begin(), cost.end()) - cost.begin());
    return pop[best];
}

}  // namespace

std::vector<double> build_weights(const std::vector<VanillaQuote>& quotes,
                                  const WeightScheme& scheme, double spot,
                                  const MarketConvention& conv) {
    std::vector<double> w;
    w.reserve(quotes.size());
    for (const VanillaQuote& q : quotes) {
        switch (scheme.kind) {
            case WeightKind::kUniform:
                w.push_back(1.0);
                break;
            case WeightKind::kInverseDiscount:
                if (!(q.discount > 0.0))
                    throw std::invalid_argument("build_weights: nonpositive discount");
                w.push_back(1.0 / q.discount);
                break;
            case WeightKind::kInverseVega: {
                if (std::isnan(q.implied_vol))
                    throw std::invalid_argument(
                        "build_weights: inverse-vega weighting needs implied vols on every quote");
                const double fwd = spot * std::exp((conv.r - conv.q) * q.maturity);
                const double vega = bs_vega(fwd, q.strike, q.maturity, q.implied_vol, q.discount);
                const double effective = scheme.amplify_small_vegas
                                             ? std::min(vega, scheme.vega_floor)
                                             : std::max(vega, scheme.vega_floor);
                w.push_back(1.0 / effective);
                break;
            }
        }
    }
    return w;
}

CalibrationResult calibrate(const CalibrationSpec& spec) {
    if (spec.quotes.size() < 5)
        throw std::invalid_argument("calibrate: need at least five quotes");
    if (spec.vvix_mode != VvixMode::kNone && !(spec.vvix_target > 0.0))
        throw std::invalid_argument("calibrate: VVIX anchoring needs a positive target");
    if (spec.vvix_mode == VvixMode::kPenalty && !(spec.vvix_weight >= 0.0))
        throw std::invalid_argument("calibrate: penalty weight must be nonnegative");

    const Objective obj(spec, build_weights(spec.quotes, spec.scheme, spec.spot, spec.conv));

    std::vector<double> x =
        differential_evolution(obj, spec.de_population, spec.de_generations, spec.de_seed);

    // Damped Gauss-Newton polish: Levenberg-style multiplier on the normal
    // equations, grown until a step reduces the objective.
    const std::size_t dim = obj.dimension();
    std::vector<double> r = obj.residuals(x);
    double cost = 0.0;
    for (double v : r) cost += v * v;

    bool converged = false;
    int iterations = 0;
    double damping = 1e-3;
    for (; iterations < spec.gn_max_iterations; ++iterations) {
        // central-difference Jacobian, relative bumps
        const std::size_t m = r.size();
        std::vector<double> jac(m * dim);
        for (std::size_t j = 0; j < dim; ++j) {
            const double h = 1e-6 * std::max(std::abs(x[j]), 1e-2);
            std::vector<double> xp = x, xm = x;
            xp[j] = std::min(x[j] + h, obj.upper(j));
            xm[j] = std::max(x[j] - h, obj.lower(j));
            const std::vector<double> rp = obj.residuals(xp);
            const std::vector<double> rm = obj.residuals(xm);
            const double span = xp[j] - xm[j];
            for (std::size_t i = 0; i < m; ++i) jac[i * dim + j] = (rp[i] - rm[i]) / span;
        }

        std::vector<double> jtj(dim * dim, 0.0), jtr(dim, 0.0);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t a = 0; a < dim; ++a) {
                jtr[a] += jac[i * dim + a] * r[i];
                for (std::size_t b = 0; b <= a; ++b) jtj[a * dim + b] += jac[i * dim + a] * jac[i * dim + b];
            }
        for (std::size_t a = 0; a < dim; ++a)
            for (std::size_t b = a + 1; b < dim; ++b) jtj[a * dim + b] = jtj[b * dim + a];

        double trace = 0.0;
        for (std::size_t a = 0; a < dim; ++a) trace += jtj[a * dim + a];

        bool stepped = false;
        double step_norm = 0.0;
        for (int attempt = 0; attempt < 25; ++attempt) {
            std::vector<double> lhs = jtj;
            for (std::size_t a = 0; a < dim; ++a)
                lhs[a * dim + a] += damping * std::max(trace / dim, 1e-300);
            std::vector<double> neg_jtr(dim);
            for (std::size_t a = 0; a < dim; ++a) neg_jtr[a] = -jtr[a];

            std::vector<double> delta;
            try {
                delta = solve_dense(lhs, neg_jtr);
            } catch (const std::runtime_error&) {
                damping *= 10.0;
                continue;
            }
            std::vector<double> xn(dim);
            step_norm = 0.0;
            for (std::size_t a = 0; a < dim; ++a) {
                xn[a] = std::clamp(x[a] + delta[a], obj.lower(a), obj.upper(a));
                step_norm += (xn[a] - x[a]) * (xn[a] - x[a]);
            }
            step_norm = std::sqrt(step_norm);

            double new_cost;
            std::vector<double> rn;
            try {
                rn = obj.residuals(xn);
                new_cost = 0.0;
                for (double v : rn) new_cost += v * v;
            } catch (const std::exception&) {
                damping *= 10.0;
                continue;
            }
            if (new_cost < cost) {
                const double rel_drop = (cost - new_cost) / std::max(cost, 1e-300);
                x = std::move(xn);
                r = std::move(rn);
                cost = new_cost;
                damping = std::max(damping / 3.0, 1e-12);
                stepped = true;
                if (rel_drop < spec.gn_objective_tol) converged = true;
                break;
            }
            damping *= 10.0;
        }
        if (!stepped) {
            // no descent direction at any damping: local minimum to tolerance
            converged = true;
            break;
        }
        if (step_norm < spec.gn_step_tol) {
            converged = true;
            break;
        }
        if (converged) break;
    }

    CalibrationResult out;
    out.params = obj.materialize(x);
    out.objective = cost;
    out.converged = converged;
    out.gn_iterations = iterations;
    out.residuals = r;
    out.decision_dimension = dim;
    out.objective_evaluations = obj.evaluations();
    out.vvix_simple_points = vvix_simple(out.params, spec.vvix_tenor, spec.conv).points;
    out.vvix_log_points = vvix_log_contract(out.params, spec.vvix_tenor, spec.conv).points;
    out.vvix_replication_points =
        vvix_by_replication(out.params, spec.vvix_tenor, spec.conv, default_vix_option_grid(5.0))
            .points;
    return out;
}

}  // namespace vvix
