#include "vvix/pde.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>
#include <stdexcept>
#include <string>

#include "vvix/regression.hpp"
#include "vvix/spline.hpp"

namespace vvix {
namespace {

#ifdef VVIX_PDE_USE_RKL2
constexpr double kStsLambda = 0.5;  // Runge-Kutta-Legendre second-order family
#else
constexpr double kStsLambda = 2.0;  // Runge-Kutta-Gegenbauer second-order family
#endif

// Real-stability interval of the s-stage second-order scheme: an outer step
// is stable when dt * rho_spec <= beta(s).
double sts_beta(int s, double lam) {
    return 2.0 * (s - 1) * (s + 2.0 * lam + 1.0) / (2.0 * lam + 3.0);
}

int sts_stages_for(double dt_rho, double lam) {
    int s = 2;
    while (sts_beta(s, lam) < dt_rho) {
        ++s;
        if (s > 200000) {
            throw std::runtime_error(
                "super-time-stepping stage count exceeded 200000; "
                "the operator bound or step size is pathological");
        }
    }
    return s;
}

// Stage-recurrence coefficient tables. The scheme is built on Gegenbauer
// polynomials C_k^lam evaluated at 1 (with lam = 1/2 they reduce to Legendre
// and the scheme to RKL2): b_k = C''_k / (C'_k)^2, a_k = 1 - b_k C_k, and the
// first-stage weight w1 = C'_s / C''_s.
struct StsTables {
    std::vector<double> c;  // C_k^lam(1)
    std::vector<double> b;
    std::vector<double> a;
    double w1;
};

StsTables sts_tables(int s, double lam) {
    std::vector<double> c(s + 1), d1(s + 1), d2(s + 1);
    c[0] = d1[0] = d2[0] = 1.0;
    for (int k = 1; k <= s; ++k) {
        c[k] = c[k - 1] * (k + 2.0 * lam - 1.0) / k;
        d1[k] = d1[k - 1] * (k + 2.0 * lam + 1.0) / k;  // C_k^{lam+1}(1)
        d2[k] = d2[k - 1] * (k + 2.0 * lam + 3.0) / k;  // C_k^{lam+2}(1)
    }
    std::vector<double> cp(s + 1, 0.0), cpp(s + 1, 0.0);
    for (int k = 1; k <= s; ++k) cp[k] = 2.0 * lam * d1[k - 1];
    for (int k = 2; k <= s; ++k) cpp[k] = 4.0 * lam * (lam + 1.0) * d2[k - 2];

    StsTables t;
    t.c = c;
    t.b.assign(s + 1, 0.0);
    for (int k = 2; k <= s; ++k) t.b[k] = cpp[k] / (cp[k] * cp[k]);
    t.b[0] = t.b[1] = t.b[2];
    t.a.assign(s + 1, 0.0);
    for (int k = 0; k <= s; ++k) t.a[k] = 1.0 - t.b[k] * c[k];
    t.w1 = cp[s] / cpp[s];
    return t;
}

// Precomputed pieces of the spatial operator on the uniform grid. All
// derivative stencils live in one fused sweep below; this struct only keeps
// the scalars and per-axis arrays they share.
struct OpContext {
    std::size_t nx, nv;
    const double* x;
    const double* v;
    std::vector<double> x_sq;
    double inv_2dx2;          // 1 / (2 dx^2)
    double sig2_over_2dv2;    // sigma^2 / (2 dv^2)
    double kap_over_2dv;      // kappa / (2 dv)
    double kap_over_dv;       // kappa / dv
    double rho_sig_over_4dxdv;
    double rho_sig_over_2dxdv;
    double rq_over_2dx;       // (r - q) / (2 dx)
    double rq_over_dx;
    double kap_theta_over_dv;
    double theta;
    double v_max;
    double r_c;

    OpContext(const PdeGrid& grid, const HestonParams& p, const MarketConvention& conv)
        : nx(grid.nx()), nv(grid.nv()), x(grid.x_nodes.data()), v(grid.v_nodes.data()) {
        const double dx = grid.dx();
        const double dv = grid.dv();
        x_sq.resize(nx);
        for (std::size_t i = 0; i < nx; ++i) x_sq[i] = x[i] * x[i];
        inv_2dx2 = 1.0 / (2.0 * dx * dx);
        sig2_over_2dv2 = p.sigma * p.sigma / (2.0 * dv * dv);
        kap_over_2dv = p.kappa / (2.0 * dv);
        kap_over_dv = p.kappa / dv;
        rho_sig_over_4dxdv = p.rho * p.sigma / (4.0 * dx * dv);
        rho_sig_over_2dxdv = p.rho * p.sigma / (2.0 * dx * dv);
        rq_over_2dx = (conv.r - conv.q) / (2.0 * dx);
        rq_over_dx = (conv.r - conv.q) / dx;
        kap_theta_over_dv = p.kappa * p.theta / dv;
        theta = p.theta;
        v_max = v[nv - 1];
        r_c = conv.r_C;
    }

    // Gershgorin bound on the spectral radius of the explicit operator,
    // evaluated with the interior coefficient magnitudes at every node.
    double spectral_bound() const {
        double worst = 0.0;
        for (std::size_t j = 0; j < nv; ++j) {
            const double vj = v[j];
            const double avv = sig2_over_2dv2 * vj;
            const double av = std::fabs(kap_over_2dv * (theta - vj));
            for (std::size_t i = 0; i < nx; ++i) {
                const double axx = vj * x_sq[i] * inv_2dx2;
                const double axv = std::fabs(rho_sig_over_4dxdv * vj * x[i]);
                const double ax = std::fabs(rq_over_2dx * x[i]);
                const double row =
                    4.0 * axx + 4.0 * avv + 4.0 * axv + 2.0 * ax + 2.0 * av + 2.0 * r_c;
                worst = std::max(worst, row);
            }
        }
        // Boundary rows depart from the interior pattern; bound them
        // explicitly. v = 0: 3-point one-sided drift, radius 4 kappa theta/dv.
        // v = v_max and x = x_max: one-sided first derivatives and cross
        // terms double the corresponding interior radii.
        const double x_hi = x[nx - 1];
        const double ax_hi = std::fabs(rq_over_2dx) * x_hi;
        worst = std::max(worst, 4.0 * kap_theta_over_dv + 4.0 * ax_hi + 2.0 * r_c);
        const double av_hi = std::fabs(kap_over_2dv * (theta - v_max));
        const double axv_hi = std::fabs(rho_sig_over_4dxdv) * v_max * x_hi;
        worst = std::max(worst, 4.0 * v_max * x_hi * x_hi * inv_2dx2 + 4.0 * av_hi +
                                    8.0 * axv_hi + 4.0 * ax_hi + 2.0 * r_c);
        for (std::size_t j = 1; j + 1 < nv; ++j) {
            const double vj = v[j];
            const double row = 4.0 * sig2_over_2dv2 * vj +
                               2.0 * std::fabs(kap_over_2dv * (theta - vj)) +
                               8.0 * std::fabs(rho_sig_over_4dxdv) * vj * x_hi + 4.0 * ax_hi +
                               2.0 * r_c;
            worst = std::max(worst, row);
        }
        return worst;
    }
};

// One fused pass: out[n] = c1*y1[n] + c2*y2[n] + c0*y0[n] + cl*L(y1)[n] + cl0*ly0[n],
// where L is the spatial operator with its boundary stencils. Every stage of
// the super-time-stepped update, as well as the plain operator application
// (c1 = c2 = c0 = cl0 = 0, cl = 1), runs through here.
void stage_sweep(const OpContext& op, const double* y1, const double* y2, const double* y0,
                 const double* ly0, double* out, double c1, double c2, double c0, double cl,
                 double cl0) {
    const std::size_t nx = op.nx;
    const std::size_t nv = op.nv;
    const std::size_t m = nx - 1;
    const std::size_t l = nv - 1;
    const double* x = op.x;
    const double* x2 = op.x_sq.data();
    const double rc = op.r_c;

    auto combine = [&](std::size_t n, double lv) {
        out[n] = c1 * y1[n] + c2 * y2[n] + c0 * y0[n] + cl * lv + cl0 * ly0[n];
    };

    // v = 0 row: the variance diffusion and the cross term vanish; the mean
    // reversion drift kappa*theta points into the domain, so the first
    // v-derivative is one-sided upward. The 3-point second-order form keeps
    // the boundary row from smearing O(dv) error into the low-variance
    // interior, which the variance-of-variance readout is sensitive to.
    {
        const double cdrift = 0.5 * op.kap_theta_over_dv;  // kappa*theta / (2 dv)
        auto dv_up = [&](std::size_t i) {
            return cdrift * (-3.0 * y1[i] + 4.0 * y1[nx + i] - y1[2 * nx + i]);
        };
        combine(0, dv_up(0) - rc * y1[0]);
        for (std::size_t i = 1; i < m; ++i) {
            const double lv =
                op.rq_over_2dx * x[i] * (y1[i + 1] - y1[i - 1]) + dv_up(i) - rc * y1[i];
            combine(i, lv);
        }
        combine(m, op.rq_over_dx * x[m] * (y1[m] - y1[m - 1]) + dv_up(m) - rc * y1[m]);
    }

    for (std::size_t j = 1; j < l; ++j) {
        const double vj = op.v[j];
        const double cvv = op.sig2_over_2dv2 * vj;
        const double cv = op.kap_over_2dv * (op.theta - vj);
        const double cxv = op.rho_sig_over_4dxdv * vj;
        const double cxx = vj * op.inv_2dx2;
        const std::size_t row = j * nx;

        // x = 0 column: the process degenerates to the one-dimensional
        // variance equation.
        {
            const std::size_t n = row;
            const double lv = cvv * (y1[n + nx] - 2.0 * y1[n] + y1[n - nx]) +
                              cv * (y1[n + nx] - y1[n - nx]) - rc * y1[n];
            combine(n, lv);
        }
        for (std::size_t i = 1; i < m; ++i) {
            const std::size_t n = row + i;
            const double cc = y1[n];
            const double e = y1[n + 1], w = y1[n - 1];
            const double nn = y1[n + nx], ss = y1[n - nx];
            const double ne = y1[n + nx + 1], nw = y1[n + nx - 1];
            const double se = y1[n - nx + 1], sw = y1[n - nx - 1];
            const double lv = cxx * x2[i] * (e - 2.0 * cc + w) + cvv * (nn - 2.0 * cc + ss) +
                              cxv * x[i] * (ne - nw - se + sw) +
                              op.rq_over_2dx * x[i] * (e - w) + cv * (nn - ss) - rc * cc;
            combine(n, lv);
        }
        // x = x_max column: gamma is dropped at the truncation boundary, the
        // x-drift and the cross term fall back to one-sided differences.
        {
            const std::size_t n = row + m;
            const double lv = op.rq_over_dx * x[m] * (y1[n] - y1[n - 1]) +
                              cvv * (y1[n + nx] - 2.0 * y1[n] + y1[n - nx]) +
                              cv * (y1[n + nx] - y1[n - nx]) +
                              op.rho_sig_over_2dxdv * vj * x[m] *
                                  ((y1[n + nx] - y1[n + nx - 1]) - (y1[n - nx] - y1[n - nx - 1])) -
                              rc * y1[n];
            combine(n, lv);
        }
    }

    // v = v_max row: the variance diffusion is dropped, the mean reversion
    // drift points down into the domain (one-sided downward), and the cross
    // term is one-sided in v.
    {
        const std::size_t row = l * nx;
        const double cdrift = op.kap_over_dv * (op.theta - op.v_max);
        const double ccross = op.rho_sig_over_2dxdv * op.v_max;
        const double cxx = op.v_max * op.inv_2dx2;
        combine(row, cdrift * (y1[row] - y1[row - nx]) - rc * y1[row]);
        for (std::size_t i = 1; i < m; ++i) {
            const std::size_t n = row + i;
            const double cc = y1[n];
            const double e = y1[n + 1], w = y1[n - 1];
            const double se = y1[n - nx + 1], sw = y1[n - nx - 1];
            const double lv = cxx * x2[i] * (e - 2.0 * cc + w) +
                              op.rq_over_2dx * x[i] * (e - w) + cdrift * (cc - y1[n - nx]) +
                              ccross * x[i] * ((e - se) - (w - sw)) - rc * cc;
            combine(n, lv);
        }
        const std::size_t n = row + m;
        combine(n, op.rq_over_dx * x[m] * (y1[n] - y1[n - 1]) + cdrift * (y1[n] - y1[n - nx]) -
                       rc * y1[n]);
    }
}

}  // namespace

PdeGrid build_grid(const HestonParams& params, const MarketConvention& conv, int M, int L, int N,
                   double spot, double x_max_stddevs) {
    params.validate();
    if (M < 4 || L < 4) throw std::invalid_argument("PDE grid needs at least 4 cells per axis");
    if (N < 2) throw std::invalid_argument("PDE grid needs at least 2 time steps");
    if (!(spot > 0.0)) throw std::invalid_argument("PDE grid needs a positive spot");
    if (!(x_max_stddevs > 0.0)) throw std::invalid_argument("x_max_stddevs must be positive");

    const double horizon = 2.0 * conv.delta;  // option tenor plus the VIX window
    const double x_max = spot * std::exp(x_max_stddevs * std::sqrt(params.theta * horizon));
    const double v_max = 5.0 * std::max(params.theta, params.v0);

    PdeGrid grid;
    grid.n_steps = N;
    grid.x_max_stddevs = x_max_stddevs;
    grid.spot = spot;
    grid.x_nodes.resize(M + 1);
    grid.v_nodes.resize(L + 1);
    for (int i = 0; i <= M; ++i) grid.x_nodes[i] = x_max * static_cast<double>(i) / M;
    for (int j = 0; j <= L; ++j) grid.v_nodes[j] = v_max * static_cast<double>(j) / L;
    return grid;
}

PayoffStack apply_initial_condition(const PdeGrid& grid, const std::vector<double>& strikes) {
    if (strikes.size() < 2) throw std::invalid_argument("payoff stack needs at least 2 strikes");
    PayoffStack stack;
    stack.strikes = strikes;
    stack.nx = grid.nx();
    stack.nv = grid.nv();
    const std::size_t nodes = stack.node_count();
    stack.surfaces.assign(2 * strikes.size(), std::vector<double>(nodes));
    double bound = 0.0;
    for (std::size_t k = 0; k < strikes.size(); ++k) {
        const double strike = strikes[k];
        std::vector<double>& call = stack.surfaces[k];
        std::vector<double>& put = stack.surfaces[strikes.size() + k];
        for (std::size_t i = 0; i < stack.nx; ++i) {
            const double xc = std::max(grid.x_nodes[i] - strike, 0.0);
            const double xp = std::max(strike - grid.x_nodes[i], 0.0);
            for (std::size_t j = 0; j < stack.nv; ++j) {
                call[j * stack.nx + i] = xc;
                put[j * stack.nx + i] = xp;
            }
            bound = std::max(bound, std::max(xc, xp));
        }
    }
    stack.payoff_bound = bound;
    return stack;
}

int rkg_evolve(PayoffStack& stack, const PdeGrid& grid, const HestonParams& params,
               const MarketConvention& conv, double t_from, double t_to, int n_steps) {
    if (stack.nx != grid.nx() || stack.nv != grid.nv()) {
        throw std::invalid_argument("payoff stack does not match the grid");
    }
    if (!(t_from > t_to)) throw std::invalid_argument("evolution runs backward: t_from > t_to");
    if (n_steps < 1) throw std::invalid_argument("n_steps must be at least 1");

    const OpContext op(grid, params, conv);
    const double rho_spec = op.spectral_bound();
    const double dt = (t_from - t_to) / n_steps;
    const int s = sts_stages_for(dt * rho_spec, kStsLambda);
    const StsTables tab = sts_tables(s, kStsLambda);

    const std::size_t nodes = stack.node_count();
    const double blow_up = 10.0 * std::max(stack.payoff_bound, 1e-300);
    std::vector<double> w0(nodes), wl(nodes), wa(nodes), wb(nodes);

    for (std::size_t surf = 0; surf < stack.surfaces.size(); ++surf) {
        std::vector<double>& surface = stack.surfaces[surf];
        if (surface.size() != nodes) throw std::invalid_argument("surface size mismatch");
        surface.swap(w0);  // w0 holds Y0; the surface vector is reused as scratch

        for (int step = 0; step < n_steps; ++step) {
            // L(Y0), then the first stage is a pure linear combination:
            // Y1 = Y0 + b1 C'_1(1) w1 dt L(Y0), with C'_1(1) = 2 lam.
            stage_sweep(op, w0.data(), w0.data(), w0.data(), w0.data(), wl.data(), 0.0, 0.0, 0.0,
                        1.0, 0.0);
            const double mu1 = tab.b[1] * (2.0 * kStsLambda) * tab.w1 * dt;
            for (std::size_t n = 0; n < nodes; ++n) wa[n] = w0[n] + mu1 * wl[n];

            double* pj1 = wa.data();
            double* pj2 = w0.data();
            for (int j = 2; j <= s; ++j) {
                const double chi = 2.0 * (j + kStsLambda - 1.0) / j;
                const double psi = (j + 2.0 * kStsLambda - 2.0) / j;
                const double mu = chi * tab.b[j] / tab.b[j - 1];
                const double nu = -psi * tab.b[j] / tab.b[j - 2];
                const double mu_t = mu * tab.w1;
                const double gamma_t = -tab.a[j - 1] * mu_t;
                // The Y_{j-2} buffer is free once read, so stages j >= 3
                // write into it in place; stage 2 must not clobber Y0.
                double* out = (j == 2) ? wb.data() : pj2;
                stage_sweep(op, pj1, pj2, w0.data(), wl.data(), out, mu, nu, 1.0 - mu - nu,
                            mu_t * dt, gamma_t * dt);
                pj2 = pj1;
                pj1 = out;
            }

            double worst = 0.0;
            for (std::size_t n = 0; n < nodes; ++n) worst = std::max(worst, std::fabs(pj1[n]));
            if (!(worst <= blow_up)) {
                std::ostringstream msg;
                msg << "PDE evolution blew up on surface " << surf << " at step " << step + 1
                    << " of " << n_steps << " (t = " << t_from - (step + 1) * dt
                    << ", stages = " << s << ", dt*rho = " << dt * rho_spec
                    << ", max |f| = " << worst << ", payoff bound = " << stack.payoff_bound << ")";
                throw std::runtime_error(msg.str());
            }

            // Rotate the result into w0 for the next step.
            if (pj1 == wa.data()) {
                w0.swap(wa);
            } else if (pj1 == wb.data()) {
                w0.swap(wb);
            }  // else pj1 already aliases w0 (in-place stage wrote it)
        }
        surface.swap(w0);
    }
    return s;
}

NodeStripResult node_strip(const PayoffStack& stack, const PdeGrid& grid, const StrikeGrid& grid_k,
                           double tenor) {
    const std::size_t n = grid_k.strikes.size();
    if (stack.surfaces.size() != 2 * n || stack.strikes.size() != n) {
        throw std::invalid_argument("stack and strike grid disagree on the strike count");
    }
    if (stack.nx != grid.nx() || stack.nv != grid.nv()) {
        throw std::invalid_argument("payoff stack does not match the grid");
    }
    const std::size_t nodes = stack.node_count();
    const ParityRegression regression(grid_k.strikes);
    const std::vector<double>& strikes = grid_k.strikes;

    NodeStripResult result;
    result.forward.resize(nodes);
    result.index_pts.resize(nodes);

    // Gather in node blocks so every surface is read sequentially.
    constexpr std::size_t kBlock = 512;
    std::vector<double> gathered(2 * n * kBlock);
    std::vector<double> parity_gap(n), otm(n);

    for (std::size_t n0 = 0; n0 < nodes; n0 += kBlock) {
        const std::size_t len = std::min(kBlock, nodes - n0);
        for (std::size_t surf = 0; surf < 2 * n; ++surf) {
            std::memcpy(gathered.data() + surf * kBlock, stack.surfaces[surf].data() + n0,
                        len * sizeof(double));
        }
        for (std::size_t p = 0; p < len; ++p) {
            for (std::size_t k = 0; k < n; ++k) {
                parity_gap[k] = gathered[k * kBlock + p] - gathered[(n + k) * kBlock + p];
            }
            const double forward = regression.solve(parity_gap.data(), n).beta2;
            result.forward[n0 + p] = forward;

            // At the x = 0 boundary the implied forward collapses to zero and
            // the strip is undefined; such nodes read as a zero index level.
            if (!(forward > 0.0)) {
                result.index_pts[n0 + p] = 0.0;
                ++result.no_k_star_nodes;
                continue;
            }

            // Assemble the OTM panel: puts below K*, calls above it, and the
            // call/put average at K* itself (CBOE convention for the boundary
            // strike; the call alone would leave an uncompensated
            // dK*(F-K*)/K*^2 excess in the strip). A forward below the grid
            // makes everything a call and has no boundary strike to average.
            auto it = std::upper_bound(strikes.begin(), strikes.end(), forward);
            const bool genuine_k_star = it != strikes.begin();
            const std::size_t k_star_idx =
                genuine_k_star ? static_cast<std::size_t>(it - strikes.begin() - 1) : 0;
            for (std::size_t k = 0; k < n; ++k) {
                const double call = gathered[k * kBlock + p];
                const double put = gathered[(n + k) * kBlock + p];
                if (genuine_k_star && k == k_star_idx)
                    otm[k] = 0.5 * (call + put);
                else
                    otm[k] = (k < k_star_idx) ? put : call;
            }
            const VarStripResult strip =
                strip_variance(forward, grid_k, otm, tenor, /*allow_no_k_star=*/true);
            if (strip.k_star_fallback) ++result.no_k_star_nodes;
            result.index_pts[n0 + p] = strip.vix_points;
        }
    }
    return result;
}

PayoffStack continuity_condition(const PayoffStack& stack, const PdeGrid& grid,
                                 const StrikeGrid& spx_grid, const StrikeGrid& vix_grid,
                                 const MarketConvention& conv, PdeRunInfo* info) {
    const NodeStripResult strip = node_strip(stack, grid, spx_grid, conv.delta);
    if (info != nullptr) info->no_k_star_continuity = strip.no_k_star_nodes;

    PayoffStack next;
    next.strikes = vix_grid.strikes;
    next.nx = stack.nx;
    next.nv = stack.nv;
    const std::size_t nodes = stack.node_count();
    const std::size_t n = vix_grid.strikes.size();
    next.surfaces.assign(2 * n, std::vector<double>(nodes));
    double bound = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double strike = vix_grid.strikes[k];
        std::vector<double>& call = next.surfaces[k];
        std::vector<double>& put = next.surfaces[n + k];
        for (std::size_t node = 0; node < nodes; ++node) {
            const double vix = strip.index_pts[node];
            const double xc = std::max(vix - strike, 0.0);
            const double xp = std::max(strike - vix, 0.0);
            call[node] = xc;
            put[node] = xp;
            bound = std::max(bound, std::max(xc, xp));
        }
    }
    next.payoff_bound = bound;
    return next;
}

StrikeGrid default_spx_strip(double spot, std::size_t count) {
    if (!(spot > 0.0)) throw std::invalid_argument("spot must be positive");
    if (count < 2) throw std::invalid_argument("the replication ladder needs at least 2 strikes");
    return make_strike_grid(0.4 * spot, 1.4 * spot, spot / (count - 1.0));
}

IndexQuote pde_vvix(const HestonParams& params, const MarketConvention& conv, double spot, int M,
                    int L, int N, const StrikeGrid& spx_grid, const StrikeGrid& vix_grid,
                    PdeRunInfo* info) {
    const double T = conv.delta;  // VIX-option tenor equals the VIX window
    const PdeGrid grid = build_grid(params, conv, M, L, N, spot);

    const int n1 = std::max(1, N / 2);  // [T, T + delta], the SPX leg
    const int n2 = std::max(1, N - n1);

    PdeRunInfo local;
    PdeRunInfo* out = (info != nullptr) ? info : &local;

    PayoffStack spx_stack = apply_initial_condition(grid, spx_grid.strikes);
    out->stages_leg1 = rkg_evolve(spx_stack, grid, params, conv, T + conv.delta, T, n1);

    PayoffStack vix_stack = continuity_condition(spx_stack, grid, spx_grid, vix_grid, conv, out);
    spx_stack.surfaces.clear();
    spx_stack.surfaces.shrink_to_fit();

    out->stages_leg2 = rkg_evolve(vix_stack, grid, params, conv, T, 0.0, n2);

    const NodeStripResult readout = node_strip(vix_stack, grid, vix_grid, T);
    out->no_k_star_readout = readout.no_k_star_nodes;
    {
        const OpContext op(grid, params, conv);
        out->spectral_bound = op.spectral_bound();
    }

    // Read the surface off a bicubic spline restricted to the well-resolved
    // interior box: half to one-and-a-half times the spot, variance up to
    // four times the long-run level.
    const double eps_x = 1e-12 * spot;
    const double eps_v = 1e-12 * std::max(params.theta, 1.0);
    std::vector<double> x_sel, v_sel;
    std::vector<std::size_t> xi, vj;
    for (std::size_t i = 0; i < grid.nx(); ++i) {
        if (grid.x_nodes[i] >= 0.5 * spot - eps_x && grid.x_nodes[i] <= 1.5 * spot + eps_x) {
            x_sel.push_back(grid.x_nodes[i]);
            xi.push_back(i);
        }
    }
    for (std::size_t j = 0; j < grid.nv(); ++j) {
        if (grid.v_nodes[j] <= 4.0 * params.theta + eps_v) {
            v_sel.push_back(grid.v_nodes[j]);
            vj.push_back(j);
        }
    }
    if (x_sel.size() < 2 || v_sel.size() < 2) {
        throw std::runtime_error("PDE readout box holds fewer than 2 grid nodes per axis");
    }
    std::vector<double> values(x_sel.size() * v_sel.size());
    for (std::size_t a = 0; a < x_sel.size(); ++a) {
        for (std::size_t b = 0; b < v_sel.size(); ++b) {
            values[a * v_sel.size() + b] = readout.index_pts[vj[b] * grid.nx() + xi[a]];
        }
    }
    const Spline2D spline = spline2d_fit(std::move(x_sel), std::move(v_sel), values);
    return IndexQuote{spline2d_eval(spline, spot, params.v0), T};
}

}  // namespace vvix
