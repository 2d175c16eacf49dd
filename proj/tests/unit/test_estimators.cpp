#include <gtest/gtest.h>

#include "steincmp/estimators.hpp"
#include "steincmp/models.hpp"
#include "test_support.hpp"

#include <numeric>

using namespace steincmp;
using steincmp::testing::make_gram;
using steincmp::testing::random_symmetric;
using steincmp::testing::rel_err;

namespace {

Matrix constant_off_diagonal(Eigen::Index n, double c, double diag = 0.0) {
  Matrix h = Matrix::Constant(n, n, c);
  h.diagonal().setConstant(diag);
  return h;
}

}  // namespace

TEST(KsdUstat, SimpleCases) {
  EXPECT_DOUBLE_EQ(ksd_ustat(make_gram(constant_off_diagonal(7, 2.5, -40.0))).u_stat, 2.5);
  Matrix two(2, 2);
  two << 9, 0.3, 0.3, -9;
  EXPECT_DOUBLE_EQ(ksd_ustat(make_gram(two)).u_stat, 0.3);
  EXPECT_THROW(ksd_ustat(make_gram(Matrix::Zero(1, 1))), std::invalid_argument);
}

TEST(KsdUstat, MatchesDoubleLoopAndIsPermutationInvariant) {
  Rng rng(1);
  const Matrix h = random_symmetric(6, rng);
  double sum = 0.0;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      if (i != j) sum += h(i, j);
    }
  }
  const double u = ksd_ustat(make_gram(h)).u_stat;
  EXPECT_NEAR(u, sum / 30.0, 1e-15);
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(6);
  perm.indices() << 3, 0, 5, 1, 4, 2;
  const Matrix permuted = perm * h * perm.transpose();
  EXPECT_NEAR(ksd_ustat(make_gram(permuted)).u_stat, u, 1e-15);
}

TEST(VarUstat, ConstantOffDiagonal) {
  for (int n : {4, 5, 9}) {
    const double c = 1.7;
    const VarianceEstimate v = var_ustat(make_gram(constant_off_diagonal(n, c, 123.0)));
    EXPECT_NEAR(v.a, c * c, 1e-12);
    EXPECT_NEAR(v.b, c * c, 1e-12);
    EXPECT_NEAR(v.sigma_sq, 2.0 / (n - 1.0) * (v.c - c * c), 1e-12);
  }
  const VarComponents brute = brute_var_components(make_gram(constant_off_diagonal(5, 1.7)));
  EXPECT_NEAR(brute.a, 1.7 * 1.7, 1e-12);
  EXPECT_NEAR(brute.b, 1.7 * 1.7, 1e-12);
}

TEST(VarUstat, ZeroGramAndPreconditions) {
  const VarianceEstimate v = var_ustat(make_gram(Matrix::Zero(6, 6)));
  EXPECT_EQ(v.sigma_sq, 0.0);
  EXPECT_FALSE(v.negative);
  EXPECT_THROW(var_ustat(make_gram(Matrix::Zero(3, 3))), std::invalid_argument);
}

TEST(VarUstat, CanGoNegativeAndIsFlagged) {
  // Large diagonal-free constant part with tiny spread: C - B small, A - B ~ 0.
  Rng rng(2);
  bool seen_negative = false;
  for (int r = 0; r < 2000 && !seen_negative; ++r) {
    Matrix h = constant_off_diagonal(6, 1.0) + 1e-3 * random_symmetric(6, rng);
    const VarianceEstimate v = var_ustat(make_gram(h));
    if (v.sigma_sq < 0.0) {
      seen_negative = true;
      EXPECT_TRUE(v.negative);
    }
  }
  EXPECT_TRUE(seen_negative);
}

TEST(Estimators, MatrixFormsMatchExhaustiveSums) {
  Rng rng(3);
  for (int n = 4; n <= 8; ++n) {
    for (int r = 0; r < 20; ++r) {
      const SteinGram g = make_gram(random_symmetric(n, rng, 2.0));
      const VarComponents brute = brute_var_components(g);
      const VarianceEstimate u = var_ustat(g);
      const VarianceEstimate v = var_vstat(g);
      EXPECT_LE(rel_err(u.a, brute.a), 1e-10);
      EXPECT_LE(rel_err(u.b, brute.b), 1e-10);
      EXPECT_LE(rel_err(u.c, brute.c), 1e-10);
      EXPECT_LE(rel_err(v.a, brute.a_v), 1e-10);
      EXPECT_LE(rel_err(v.b, brute.b_v), 1e-10);
    }
  }
}

TEST(VarVstat, ConstantGramHasZeroVariance) {
  const VarianceEstimate v = var_vstat(make_gram(Matrix::Constant(5, 5, -0.8)));
  EXPECT_NEAR(v.a, 0.64, 1e-14);
  EXPECT_NEAR(v.b, 0.64, 1e-14);
  EXPECT_EQ(v.sigma_sq, 0.0);
}

TEST(VarVstat, RequiresDiagonal) {
  EXPECT_THROW(var_vstat(make_gram(Matrix::Zero(4, 4), false)), std::invalid_argument);
  EXPECT_THROW(var_vstat(make_gram(Matrix::Zero(1, 1))), std::invalid_argument);
}

TEST(VarVstat, RankOneGram) {
  Rng rng(4);
  const int n = 7;
  const Vector v = steincmp::standard_normal(n, rng);
  const VarianceEstimate est = var_vstat(make_gram(v * v.transpose()));
  const double mean = v.mean();
  const double spread = (v.array() - mean).square().mean();
  EXPECT_NEAR(est.sigma_sq, 4.0 * (n - 2.0) / (n - 1.0) * mean * mean * spread, 1e-12);
}

TEST(VarVstat, NeverNegative) {
  Rng rng(5);
  std::uniform_int_distribution<int> size(2, 30);
  for (int r = 0; r < 10000; ++r) {
    const int n = size(rng);
    Matrix h = random_symmetric(n, rng);
    if (r % 3 == 0) h.array() += 50.0;  // near-constant grams stress cancellation
    EXPECT_GE(var_vstat(make_gram(h)).sigma_sq, 0.0);
  }
}

TEST(EstimateVariance, Dispatches) {
  Rng rng(6);
  const SteinGram g = make_gram(random_symmetric(6, rng));
  EXPECT_EQ(estimate_variance(g, VarianceMethod::UStat).sigma_sq, var_ustat(g).sigma_sq);
  EXPECT_EQ(estimate_variance(g, VarianceMethod::VStat).sigma_sq, var_vstat(g).sigma_sq);
  EXPECT_EQ(variance_method_from_string(to_string(VarianceMethod::UStat)), VarianceMethod::UStat);
  EXPECT_THROW(variance_method_from_string("jackknife"), std::invalid_argument);
}

TEST(KsdExact, StandardNormalHandFormula) {
  const PpcaModel model(Matrix::Zero(2, 1), 1.0);  // marginal N(0, I), score -x
  RowMatrix pts(2, 2);
  pts << 0.5, -0.2, -1.0, 0.7;
  const Dataset data(pts);
  const double lambda = 1.3;
  const auto spec = KernelSpec::gaussian_sq(Bandwidth(lambda));
  const Vector x = pts.row(0).transpose();
  const Vector y = pts.row(1).transpose();
  const double r2 = (x - y).squaredNorm();
  const double c = 2.0 / (lambda * lambda);
  const double k = std::exp(-r2 / (lambda * lambda));
  // sx = -x, sy = -y; k1(x,y) = -c (x-y) k, k1(y,x) = -c (y-x) k
  const double expected = x.dot(y) * k + (-x).dot(-c * (y - x) * k) +
                          (-c * (x - y) * k).dot(-y) + k * (c * 2 - c * c * r2);
  EXPECT_NEAR(ksd_exact(model.marginal_score_fn(), data, spec).u_stat, expected, 1e-14);
}

TEST(KsdExact, NearZeroOnModelSamples) {
  const auto model = PpcaModel::random_uniform(4, 2, 1.0, 7);
  const Dataset data = model.sample(500, 8);
  const auto spec = KernelSpec::gaussian_sq(median_heuristic(data));
  const SteinGram g = stein_gram(marginal_scores(model.marginal_score_fn(), data), data, spec);
  EXPECT_LT(std::abs(ksd_ustat(g).u_stat), 3.0 * std::sqrt(var_vstat(g).sigma_sq / 500.0));
}

TEST(KsdExact, LatentPipelineConvergesToIt) {
  // Averaged scores are unbiased and independent across observations, so the latent
  // U-statistic is unbiased for the exact one given the data.
  const auto reference = PpcaModel::random_uniform(4, 2, 1.0, 9);
  const auto model = reference.perturb(1.0);
  const Dataset data = reference.sample(30, 10);
  const auto spec = KernelSpec::gaussian_sq(median_heuristic(data));
  const double exact = ksd_exact(model.marginal_score_fn(), data, spec).u_stat;
  std::vector<double> reps;
  for (int r = 0; r < 10; ++r) {
    std::vector<LatentBatch> latents;
    for (Eigen::Index i = 0; i < data.size(); ++i) {
      latents.push_back(model.posterior_exact(data.row(i), 5000, derive_seed(11, static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(i))));
    }
    const ScoreMatrix s = average_scores(model.cond_score_fn(), data, latents);
    reps.push_back(ksd_ustat(stein_gram(s, data, spec)).u_stat);
  }
  const double mean = std::accumulate(reps.begin(), reps.end(), 0.0) / reps.size();
  double var = 0.0;
  for (double v : reps) var += (v - mean) * (v - mean);
  const double se = std::sqrt(var / (reps.size() - 1.0) / reps.size());
  EXPECT_LE(std::abs(mean - exact), 3.0 * se + 1e-12);
}

TEST(KsdUstat, UnbiasedAcrossSampleSizes) {
  const auto reference = PpcaModel::random_uniform(3, 1, 1.0, 12);
  const auto model = reference.perturb(2.0);
  const auto spec = KernelSpec::gaussian_sq(Bandwidth(2.0));
  auto stats = [&](int n, std::uint64_t role) {
    std::vector<double> out;
    for (int r = 0; r < 200; ++r) {
      const Dataset data = reference.sample(n, derive_seed(13, static_cast<std::uint64_t>(r), role));
      out.push_back(ksd_exact(model.marginal_score_fn(), data, spec).u_stat);
    }
    return out;
  };
  auto mean_se = [](const std::vector<double>& v) {
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::pair{m, std::sqrt(s / (v.size() - 1.0) / v.size())};
  };
  const auto [m50, se50] = mean_se(stats(50, 1));
  const auto [m200, se200] = mean_se(stats(200, 2));
  EXPECT_GT(m200, 0.0);
  EXPECT_LE(std::abs(m50 - m200), 4.0 * std::hypot(se50, se200));
}
