#include "vvix/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace vvix {

double ncx2_sample(double dof, double lambda, std::mt19937_64& rng) {
    if (!(dof > 0.0)) throw std::domain_error("ncx2_sample: dof must be positive");
    if (!(lambda >= 0.0)) throw std::domain_error("ncx2_sample: noncentrality must be nonnegative");

    if (dof <= 1.0) {
        // chi'2_d(lambda) = chi2_{d+2N} with N ~ Poisson(lambda/2); a central
        // chi-squared with shape nu is Gamma(nu/2, scale 2).
        long n = 0;
        if (lambda > 0.0) {
            std::poisson_distribution<long> poisson(0.5 * lambda);
            n = poisson(rng);
        }
        std::gamma_distribution<double> gamma(0.5 * dof + n, 2.0);
        return gamma(rng);
    }

    // (Z + sqrt(lambda))^2 carries one degree of freedom and all of the
    // noncentrality; the remaining dof-1 degrees are central.
    std::normal_distribution<double> normal(0.0, 1.0);
    const double shifted = normal(rng) + std::sqrt(lambda);
    std::gamma_distribution<double> gamma(0.5 * (dof - 1.0), 2.0);
    return shifted * shifted + gamma(rng);
}

}  // namespace vvix
