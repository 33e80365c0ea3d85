#pragma once

#include <cstddef>
#include <vector>

namespace vvix {

// Least-squares line fit g_i ~ beta1*K_i + beta2 through the 2x2 normal
// equations, solved in strike-centered coordinates for conditioning.
// Construction factors the strike-only side once so that thousands of
// right-hand sides (one per grid node) reuse it.
class ParityRegression {
  public:
    explicit ParityRegression(const std::vector<double>& strikes);

    struct Fit {
        double beta1;  // slope; minus the discount factor for a call-put line
        double beta2;  // intercept; the implied forward under parity
    };

    Fit solve(const double* g, std::size_t n) const;
    Fit solve(const std::vector<double>& g) const { return solve(g.data(), g.size()); }

    std::size_t size() const { return centered_.size(); }

  private:
    std::vector<double> centered_;  // K_i - mean strike
    double mean_strike_;
    double sum_sq_centered_;
};

// One-shot convenience wrapper over ParityRegression.
ParityRegression::Fit solve_parity_regression(const std::vector<double>& strikes,
                                              const std::vector<double>& g);

}  // namespace vvix
