#pragma once

// Latent-variable model families: probabilistic PCA, latent Dirichlet allocation and a
// Gaussian Dirichlet-process mixture. Each exposes data generation, the conditional
// score s_p(x|z), a posterior sampler per observation and a perturbation constructor.
// Models are immutable after construction; every sampler takes an explicit seed.

#include "steincmp/mcmc.hpp"
#include "steincmp/stein.hpp"

#include <optional>

namespace steincmp {

/// x | z ~ N(A z, psi^2 I), z ~ N(0, I).
class PpcaModel {
 public:
  PpcaModel(Matrix weights, double psi);

  /// Weights drawn i.i.d. from U[0, 1].
  static PpcaModel random_uniform(int data_dim, int latent_dim, double psi, std::uint64_t seed);

  /// Adds delta to the (0, 0) weight.
  PpcaModel perturb(double delta) const;

  const Matrix& weights() const { return weights_; }
  double psi() const { return psi_; }
  int data_dim() const { return static_cast<int>(weights_.rows()); }
  int latent_dim() const { return static_cast<int>(weights_.cols()); }

  Matrix marginal_cov() const;
  Matrix posterior_cov() const { return posterior_cov_; }
  Vector posterior_mean(Point x) const;
  /// Negative Hessian of the log posterior, I + A'A / psi^2 (independent of x).
  const Matrix& posterior_precision() const { return posterior_precision_; }

  Dataset sample(Eigen::Index n, std::uint64_t seed) const;

  void cond_score(Point x, Point z, std::span<double> out) const;
  Vector cond_score(Point x, Point z) const;
  /// -(A A' + psi^2 I)^-1 x.
  Vector marginal_score(Point x) const;

  LatentBatch posterior_exact(Point x, Eigen::Index m, std::uint64_t seed) const;
  LatentBatch posterior_mcmc(Point x, Eigen::Index m, int burn_in, const MalaParams& params,
                             std::uint64_t seed) const;

  CondScoreFn cond_score_fn() const;
  MarginalScoreFn marginal_score_fn() const;

 private:
  Matrix weights_;
  double psi_;
  Eigen::LLT<Matrix> marginal_llt_;
  Matrix posterior_precision_;
  Matrix posterior_cov_;
  Matrix posterior_cov_chol_;  // lower factor of posterior_cov_
};

/// theta ~ Dir(a); per word z ~ Cat(theta), x ~ Cat(b_z).
class LdaModel {
 public:
  LdaModel(Vector concentration, Matrix topics);

  /// K topic rows drawn from Dir(1) over L words, symmetric concentration a0.
  static LdaModel with_random_topics(int topics, int vocab_size, double a0, std::uint64_t seed);

  /// Adds delta to every concentration entry.
  LdaModel perturb(double delta) const;

  const Vector& concentration() const { return concentration_; }
  const Matrix& topics() const { return topics_; }
  int num_topics() const { return static_cast<int>(topics_.rows()); }
  int vocab_size() const { return static_cast<int>(topics_.cols()); }

  Dataset sample(Eigen::Index n, int words, std::uint64_t seed) const;

  void cond_score(Point x, Point z, std::span<double> out) const;
  Vector cond_score(Point x, Point z) const;

  /// Random-scan collapsed Gibbs over topic assignments with theta integrated out.
  /// One sweep is `words` uniformly chosen coordinate updates; records one state per sweep
  /// after `burn_in` sweeps.
  LatentBatch collapsed_gibbs(Point x, Eigen::Index m, int burn_in, std::uint64_t seed) const;

  CondScoreFn cond_score_fn(int words) const;

 private:
  Vector concentration_;
  Matrix topics_;
  Matrix score_table_;  // b[k][(v+1) mod L] / b[k][v] - 1
};

/// Mixture weights of the conditional target psi(x|z) F(dz) for one state of the
/// training latents: base-measure component versus empirical training-latent component.
struct PredictiveWeights {
  double base = 1.0;       // pi_a = C_a / (C_a + n C_b)
  double empirical = 0.0;  // pi_b = 1 - pi_a
};

/// x_i ~ N(z_i, phi^2 I), z_i ~ F, F ~ DP(N(mu, I)); optionally conditioned on training data.
class GdpmModel {
 public:
  GdpmModel(Vector mu, double phi_sq, std::optional<RowMatrix> training = std::nullopt);

  GdpmModel conditioned_on(RowMatrix training) const;
  /// Prior mean shifted to delta * 1 / sqrt(D).
  static GdpmModel shifted(int dim, double delta, double phi_sq);

  const Vector& mu() const { return mu_; }
  double phi_sq() const { return phi_sq_; }
  int data_dim() const { return static_cast<int>(mu_.size()); }
  const std::optional<RowMatrix>& training_data() const { return training_; }

  /// Draws from the unconditioned marginal N(mu, (phi^2 + 1) I).
  Dataset marginal_sample(Eigen::Index n, std::uint64_t seed) const;

  void cond_score(Point x, Point z, std::span<double> out) const;
  Vector cond_score(Point x, Point z) const;

  PredictiveWeights predictive_weights(Point x, const RowMatrix& training_latents) const;

  /// Draws of the test-point latent z under psi(x|z) Fbar(dz) / p(x|D). One transition is
  /// a random-scan Gibbs pass over the training latents (conjugate Chinese-restaurant
  /// updates, the test latent counted as a customer), an independence Metropolis step for
  /// z proposing from (a + sum_i delta_{z~_i}) / (n_tr + 1) and accepting with
  /// psi(x|z') / psi(x|z), then a conjugate redraw of every cluster location.
  LatentBatch posterior_sampler(Point x, Eigen::Index m, int burn_in, std::uint64_t seed) const;

  CondScoreFn cond_score_fn() const;

 private:
  Vector mu_;
  double phi_sq_;
  std::optional<RowMatrix> training_;
};

}  // namespace steincmp
