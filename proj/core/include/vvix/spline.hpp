#pragma once

#include <vector>

namespace vvix {

// Natural bicubic tensor-product spline. The coefficient tables hold, per
// node, the value plus the second-derivative surfaces in x, in y, and mixed;
// together the four corner quantities of a cell pin its bicubic polynomial.
// All tables are row-major with x as the slow index: index = ix*ny + iy.
struct Spline2D {
    std::vector<double> x_knots;
    std::vector<double> y_knots;
    std::vector<double> values;
    std::vector<double> d2x;
    std::vector<double> d2y;
    std::vector<double> d2xy;
};

// Builds the spline through `values` (row-major, x_knots.size() by
// y_knots.size()). Knots must be strictly ascending with at least two per
// axis. Natural (zero second derivative) boundaries; interpolates the node
// values exactly and is C-squared inside the knot box.
Spline2D spline2d_fit(std::vector<double> x_knots, std::vector<double> y_knots,
                      const std::vector<double>& values);

// Evaluates the spline; (x, y) outside the knot box is a domain error.
double spline2d_eval(const Spline2D& s, double x, double y);

}  // namespace vvix
