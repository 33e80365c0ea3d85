#include "vvix/regression.hpp"

#include <numeric>
#include <stdexcept>

namespace vvix {

ParityRegression::ParityRegression(const std::vector<double>& strikes) {
    if (strikes.size() < 2)
        throw std::invalid_argument("ParityRegression: need at least two strikes");

    mean_strike_ =
        std::accumulate(strikes.begin(), strikes.end(), 0.0) / static_cast<double>(strikes.size());
    centered_.reserve(strikes.size());
    sum_sq_centered_ = 0.0;
    for (double k : strikes) {
        const double c = k - mean_strike_;
        centered_.push_back(c);
        sum_sq_centered_ += c * c;
    }
    if (!(sum_sq_centered_ > 0.0))
        throw std::invalid_argument("ParityRegression: strikes are all equal, system is singular");
}

ParityRegression::Fit ParityRegression::solve(const double* g, std::size_t n) const {
    if (n != centered_.size())
        throw std::invalid_argument("ParityRegression: right-hand side size mismatch");

    double mean_g = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean_g += g[i];
    mean_g /= static_cast<double>(n);

    double cross = 0.0;
    for (std::size_t i = 0; i < n; ++i) cross += centered_[i] * (g[i] - mean_g);

    const double beta1 = cross / sum_sq_centered_;
    return {beta1, mean_g - beta1 * mean_strike_};
}

ParityRegression::Fit solve_parity_regression(const std::vector<double>& strikes,
                                              const std::vector<double>& g) {
    return ParityRegression(strikes).solve(g);
}

}  // namespace vvix
