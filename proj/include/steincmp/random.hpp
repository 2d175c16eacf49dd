#pragma once

#include "steincmp/common.hpp"

namespace steincmp {

double standard_normal(Rng& rng);
Vector standard_normal(Eigen::Index n, Rng& rng);
double uniform01(Rng& rng);

/// Gamma(shape, 1) by Marsaglia-Tsang; shapes below one use the U^(1/shape) boost.
double sample_gamma(double shape, Rng& rng);

/// Dirichlet via normalised Gamma draws.
Vector sample_dirichlet(const Vector& concentration, Rng& rng);

/// Index drawn with probability weights[k] / sum(weights). Weights must be non-negative
/// with a positive total.
int sample_categorical(std::span<const double> weights, Rng& rng);

}  // namespace steincmp
