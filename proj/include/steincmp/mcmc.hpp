#pragma once

#include "steincmp/common.hpp"

#include <functional>

namespace steincmp {

/// Unnormalised log density; writes the gradient into `grad`.
using LogDensityGrad = std::function<double(const Vector& z, Vector& grad)>;

struct MalaParams {
  double step_size = 0.5;
  bool adapt = true;  // Robbins-Monro step adaptation during burn-in
  double target_accept = 0.574;
  int thin = 1;       // transitions between recorded states
  bool use_metric = true;
};

struct MalaRun {
  RowMatrix draws;
  double acceptance_rate = 0.0;  // over the recording phase
  double final_step_size = 0.0;
};

/// Metropolis-adjusted Langevin chain with an optional constant metric G (proposal
/// covariance step^2 * G^-1). Runs `burn_in` transitions (adapting the step when
/// requested), then records `m` states `thin` transitions apart.
MalaRun run_mala(const LogDensityGrad& target, Vector init, Eigen::Index m, int burn_in,
                 const MalaParams& params, const Matrix* metric, Rng& rng);

}  // namespace steincmp
