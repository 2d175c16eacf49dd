#include "steincmp/mcmc.hpp"

#include "steincmp/random.hpp"

#include <cmath>

namespace steincmp {

MalaRun run_mala(const LogDensityGrad& target, Vector init, Eigen::Index m, int burn_in,
                 const MalaParams& params, const Matrix* metric, Rng& rng) {
  if (m < 1) throw std::invalid_argument("run_mala: m must be >= 1");
  if (burn_in < 0) throw std::invalid_argument("run_mala: burn-in must be >= 0");
  if (params.thin < 1) throw std::invalid_argument("run_mala: thin must be >= 1");
  if (!(params.step_size > 0.0)) throw std::invalid_argument("run_mala: step size must be > 0");

  const Eigen::Index dim = init.size();
  Eigen::LLT<Matrix> chol;
  if (metric != nullptr) {
    if (metric->rows() != dim || metric->cols() != dim) {
      throw std::invalid_argument("run_mala: metric shape does not match the state");
    }
    chol.compute(*metric);
    if (chol.info() != Eigen::Success) {
      throw std::invalid_argument("run_mala: metric is not positive definite");
    }
  }
  // Inverse metric applied to a vector, G^-1/2 noise, and the G-norm of a vector.
  auto precondition = [&](const Vector& v) -> Vector {
    return metric ? Vector(chol.solve(v)) : v;
  };
  auto noise = [&](const Vector& xi) -> Vector {
    return metric ? Vector(chol.matrixU().solve(xi)) : xi;
  };
  auto g_norm_sq = [&](const Vector& v) -> double {
    return metric ? v.dot(*metric * v) : v.squaredNorm();
  };

  Vector z = std::move(init);
  Vector grad(dim);
  double logp = target(z, grad);
  if (!std::isfinite(logp)) {
    throw std::runtime_error("run_mala: non-finite log density at the initial state");
  }
  Vector drift = precondition(grad);

  double log_step = std::log(params.step_size);
  Vector grad_new(dim);
  Eigen::Index accepted = 0;
  Eigen::Index proposals = 0;

  struct Step {
    double accept_prob;
    bool accepted;
  };
  auto transition = [&](double step) -> Step {
    const double h = step * step;
    const Vector mean_fwd = z + 0.5 * h * drift;
    const Vector prop = mean_fwd + step * noise(standard_normal(dim, rng));
    const double logp_new = target(prop, grad_new);
    if (!std::isfinite(logp_new)) {
      throw std::runtime_error("run_mala: non-finite log density encountered");
    }
    const Vector drift_new = precondition(grad_new);
    const Vector mean_bwd = prop + 0.5 * h * drift_new;
    const double log_q_fwd = -g_norm_sq(prop - mean_fwd) / (2.0 * h);
    const double log_q_bwd = -g_norm_sq(z - mean_bwd) / (2.0 * h);
    const double log_ratio = logp_new - logp + log_q_bwd - log_q_fwd;
    const double accept_prob = log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
    if (uniform01(rng) < accept_prob) {
      z = prop;
      logp = logp_new;
      grad = grad_new;
      drift = drift_new;
      return {accept_prob, true};
    }
    return {accept_prob, false};
  };

  for (int k = 0; k < burn_in; ++k) {
    const Step r = transition(std::exp(log_step));
    if (params.adapt) {
      log_step += (r.accept_prob - params.target_accept) / std::pow(k + 1.0, 0.6);
    }
  }

  const double step = std::exp(log_step);
  MalaRun run;
  run.draws.resize(m, dim);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (int s = 0; s < params.thin; ++s) {
      if (transition(step).accepted) ++accepted;
      ++proposals;
    }
    run.draws.row(j) = z.transpose();
  }
  run.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(proposals);
  run.final_step_size = step;
  return run;
}

}  // namespace steincmp
