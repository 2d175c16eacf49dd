#pragma once

// Closed-form and brute-force reference computations used to validate problem
// construction and the estimator pipeline.

#include "steincmp/models.hpp"

#include <vector>

namespace steincmp {

struct GaussianSpec {
  Vector mean;
  Matrix cov;

  GaussianSpec(Vector mean, Matrix cov);
  /// Zero-mean Gaussian.
  explicit GaussianSpec(Matrix cov);

  Eigen::Index dim() const { return mean.size(); }
};

/// log|M| for a symmetric positive-definite M, from its Cholesky factor.
double log_det_spd(const Matrix& m);

/// MMD^2(p, r) - MMD^2(q, r) under exp(-|x-y|^2 / (2 lambda^2)), all three zero-mean.
double gaussian_mmd_sq_diff(const GaussianSpec& p, const GaussianSpec& q, const GaussianSpec& r,
                            Bandwidth lambda);

struct MonteCarloValue {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// KSD^2 of N(0, cov_p) against data N(0, cov_r): E[x1' S^2 x2 k(x1, x2)] with
/// S = cov_p^-1 - cov_r^-1 and x1, x2 independent draws of r. Monte Carlo over mc_n pairs.
MonteCarloValue gaussian_ksd_sq(const GaussianSpec& p, const GaussianSpec& r,
                                const KernelSpec& kernel, Eigen::Index mc_n, std::uint64_t seed);

/// Variance components by exhaustive index sums.
struct VarComponents {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double a_v = 0.0;
  double b_v = 0.0;
};

/// Needs n <= 12.
VarComponents brute_var_components(const SteinGram& gram);

/// Exact p(z | x) over all K^D topic assignments. Assignment index s encodes word j's
/// topic as digit j of s in base K.
struct LdaPosteriorTable {
  int topics = 0;
  int words = 0;
  std::vector<double> probs;

  std::vector<int> assignment(std::size_t index) const;
  std::size_t index_of(std::span<const int> assignment) const;
};

/// Needs K^D <= 4096.
LdaPosteriorTable enumerate_lda_posterior(const LdaModel& model, Point doc);

}  // namespace steincmp
