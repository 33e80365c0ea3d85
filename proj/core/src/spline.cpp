#include "vvix/spline.hpp"

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace vvix {
namespace {

// Natural-cubic second derivatives at the knots: Thomas solve of the
// standard tridiagonal continuity system with zero end conditions.
// Strided access lets rows and columns of a flat matrix share the routine.
void second_derivatives(const double* x, const double* y, std::size_t n, std::ptrdiff_t y_stride,
                        double* m, std::ptrdiff_t m_stride) {
    m[0] = 0.0;
    m[(n - 1) * m_stride] = 0.0;
    if (n == 2) return;

    std::vector<double> diag(n), rhs(n), upper(n);
    diag[0] = 1.0;
    rhs[0] = 0.0;
    upper[0] = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hl = x[i] - x[i - 1];
        const double hr = x[i + 1] - x[i];
        const double sl = (y[i * y_stride] - y[(i - 1) * y_stride]) / hl;
        const double sr = (y[(i + 1) * y_stride] - y[i * y_stride]) / hr;
        const double lower = hl / 6.0;
        diag[i] = (hl + hr) / 3.0;
        upper[i] = hr / 6.0;
        rhs[i] = sr - sl;
        // forward elimination against the previous row
        const double w = lower / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    double carry = 0.0;  // m[n-1] = 0, so back substitution starts at zero
    for (std::size_t i = n - 2; i >= 1; --i) {
        carry = (rhs[i] - upper[i] * carry) / diag[i];
        m[i * m_stride] = carry;
    }
}

struct CellWeights {
    std::size_t left;
    double a, b;      // linear blending weights toward left/right knot
    double ca, cb;    // cubic correction weights (A^3-A)h^2/6, (B^3-B)h^2/6
};

CellWeights locate(const std::vector<double>& knots, double t, const char* axis) {
    if (t < knots.front() || t > knots.back())
        throw std::domain_error(std::string("spline2d_eval: ") + axis +
                                " outside the interpolation box");
    std::size_t hi = static_cast<std::size_t>(
        std::upper_bound(knots.begin(), knots.end(), t) - knots.begin());
    hi = std::clamp<std::size_t>(hi, 1, knots.size() - 1);
    const std::size_t lo = hi - 1;
    const double h = knots[hi] - knots[lo];
    const double a = (knots[hi] - t) / h;
    const double b = (t - knots[lo]) / h;
    const double q = h * h / 6.0;
    return {lo, a, b, (a * a * a - a) * q, (b * b * b - b) * q};
}

double cubic(const CellWeights& w, double y0, double y1, double m0, double m1) {
    return w.a * y0 + w.b * y1 + w.ca * m0 + w.cb * m1;
}

}  // namespace

Spline2D spline2d_fit(std::vector<double> x_knots, std::vector<double> y_knots,
                      const std::vector<double>& values) {
    const std::size_t nx = x_knots.size();
    const std::size_t ny = y_knots.size();
    if (nx < 2 || ny < 2)
        throw std::invalid_argument("spline2d_fit: need at least two knots per axis");
    for (std::size_t i = 1; i < nx; ++i)
        if (!(x_knots[i] > x_knots[i - 1]))
            throw std::invalid_argument("spline2d_fit: x knots must be strictly ascending");
    for (std::size_t j = 1; j < ny; ++j)
        if (!(y_knots[j] > y_knots[j - 1]))
            throw std::invalid_argument("spline2d_fit: y knots must be strictly ascending");
    if (values.size() != nx * ny)
        throw std::invalid_argument("spline2d_fit: value matrix does not match the knot grid");

    Spline2D s;
    s.x_knots = std::move(x_knots);
    s.y_knots = std::move(y_knots);
    s.values = values;
    s.d2x.assign(nx * ny, 0.0);
    s.d2y.assign(nx * ny, 0.0);
    s.d2xy.assign(nx * ny, 0.0);

    const std::ptrdiff_t sy = static_cast<std::ptrdiff_t>(ny);
    for (std::size_t i = 0; i < nx; ++i)  // along y within each x-row
        second_derivatives(s.y_knots.data(), &s.values[i * ny], ny, 1, &s.d2y[i * ny], 1);
    for (std::size_t j = 0; j < ny; ++j) {  // along x within each y-column
        second_derivatives(s.x_knots.data(), &s.values[j], nx, sy, &s.d2x[j], sy);
        second_derivatives(s.x_knots.data(), &s.d2y[j], nx, sy, &s.d2xy[j], sy);
    }
    return s;
}

double spline2d_eval(const Spline2D& s, double x, double y) {
    const CellWeights wx = locate(s.x_knots, x, "x");
    const CellWeights wy = locate(s.y_knots, y, "y");
    const std::size_t ny = s.y_knots.size();

    // Interpolate along x first: the cell values f(x, y_j), f(x, y_{j+1})
    // and the y-curvatures at the same x, then finish with one cubic in y.
    auto column = [&](std::size_t j, const std::vector<double>& val,
                      const std::vector<double>& curv) {
        const std::size_t lo = wx.left * ny + j;
        const std::size_t hi = (wx.left + 1) * ny + j;
        return cubic(wx, val[lo], val[hi], curv[lo], curv[hi]);
    };
    const double f0 = column(wy.left, s.values, s.d2x);
    const double f1 = column(wy.left + 1, s.values, s.d2x);
    const double m0 = column(wy.left, s.d2y, s.d2xy);
    const double m1 = column(wy.left + 1, s.d2y, s.d2xy);
    return cubic(wy, f0, f1, m0, m1);
}

}  // namespace vvix
