#pragma once

#include <random>

namespace vvix {

// One exact draw from the non-central chi-squared law with `dof` degrees of
// freedom and noncentrality `lambda`. For dof > 1 the draw decomposes as a
// shifted normal squared plus a central chi-squared with dof-1 degrees; at
// or below one degree of freedom that split is unavailable, so the draw
// mixes a Poisson(lambda/2) order into a central chi-squared instead.
// Deterministic for a given generator state.
double ncx2_sample(double dof, double lambda, std::mt19937_64& rng);

}  // namespace vvix
