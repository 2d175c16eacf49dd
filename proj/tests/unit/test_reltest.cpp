#include <gtest/gtest.h>

#include "steincmp/reltest.hpp"
#include "test_support.hpp"

using namespace steincmp;
using steincmp::testing::make_gram;
using steincmp::testing::random_symmetric;

namespace {

// Off-diagonal mean 0.5 and V-statistic sigma^2 exactly 1 at n = 100.
SteinGram synthetic_gram() {
  const int n = 100;
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = (i % 2 == 0) ? 1.0 : -1.0;
  const double eps = std::sqrt(99.0 / (4.0 * 98.0));
  const Vector ones = Vector::Ones(n);
  return make_gram(0.5 * ones * ones.transpose() + eps * (v * ones.transpose() + ones * v.transpose()));
}

}  // namespace

TEST(NormalQuantile, ReferenceValues) {
  EXPECT_EQ(normal_quantile(0.5), 0.0);
  EXPECT_NEAR(normal_quantile(0.95), 1.6448536269514722, 1e-9);
  EXPECT_NEAR(normal_quantile(0.99), 2.3263478740408408, 1e-9);
  EXPECT_NEAR(normal_quantile(0.05), -1.6448536269514722, 1e-9);
  EXPECT_NEAR(normal_quantile(1e-10), -6.361340902404056, 1e-8);
  EXPECT_THROW(normal_quantile(0.0), std::invalid_argument);
  EXPECT_THROW(normal_quantile(1.0), std::invalid_argument);
}

TEST(NormalQuantile, InvertsTheCdf) {
  for (double p = 0.001; p < 1.0; p += 0.0137) {
    EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-12);
  }
}

TEST(RelativeTest, IdenticalGramsAreDegenerate) {
  Rng rng(1);
  const SteinGram g = make_gram(random_symmetric(20, rng));
  for (auto method : {VarianceMethod::UStat, VarianceMethod::VStat}) {
    const TestReport r = relative_test(g, g, TestConfig{0.05, method});
    EXPECT_EQ(r.u_diff, 0.0);
    EXPECT_TRUE(r.degenerate);
    EXPECT_FALSE(r.reject);
    EXPECT_EQ(r.p_value, 1.0);
    EXPECT_TRUE(std::isnan(r.statistic));
  }
}

TEST(RelativeTest, SyntheticStatistic) {
  const TestReport r = relative_test_diff(synthetic_gram(), TestConfig{0.05});
  EXPECT_NEAR(r.u_diff, 0.5, 1e-12);
  EXPECT_NEAR(r.sigma, 1.0, 1e-12);
  EXPECT_NEAR(r.statistic, 5.0, 1e-10);
  EXPECT_NEAR(r.threshold, 1.6448536269514722, 1e-9);
  EXPECT_TRUE(r.reject);
  EXPECT_FALSE(r.degenerate);
  EXPECT_NEAR(r.p_value, 0.5 * std::erfc(5.0 / std::sqrt(2.0)), 1e-15);
}

TEST(RelativeTest, NegativeStatisticNeverRejects) {
  SteinGram g = synthetic_gram();
  g.h = -g.h;
  const TestReport r = relative_test_diff(g, TestConfig{0.05});
  EXPECT_LT(r.u_diff, 0.0);
  EXPECT_FALSE(r.reject);
  EXPECT_GT(r.p_value, 0.5);
}

TEST(RelativeTest, ScaleEquivariance) {
  Rng rng(2);
  for (int r = 0; r < 200; ++r) {
    Matrix h = random_symmetric(15, rng);
    h.array() += 0.3;
    const SteinGram p = make_gram(h);
    const SteinGram q = make_gram(Matrix::Zero(15, 15));
    const TestReport base = relative_test(p, q, TestConfig{0.05});
    const SteinGram ps = make_gram(3.7 * h);
    const TestReport scaled = relative_test(ps, q, TestConfig{0.05});
    EXPECT_NEAR(scaled.u_diff, 3.7 * base.u_diff, 1e-12);
    EXPECT_NEAR(scaled.sigma, 3.7 * base.sigma, 1e-12);
    EXPECT_EQ(scaled.reject, base.reject);
  }
}

TEST(RelativeTest, SmallerAlphaNeverCreatesRejections) {
  Rng rng(3);
  for (int r = 0; r < 200; ++r) {
    Matrix h = random_symmetric(12, rng);
    h.array() += 0.4;
    const SteinGram g = make_gram(h);
    bool prev = true;
    for (double alpha : {0.5, 0.2, 0.1, 0.05, 0.01, 0.001}) {
      const TestReport rep = relative_test_diff(g, TestConfig{alpha});
      EXPECT_TRUE(prev || !rep.reject);
      prev = rep.reject;
      EXPECT_GE(rep.p_value, 0.0);
      EXPECT_LE(rep.p_value, 1.0);
      if (!rep.degenerate) EXPECT_EQ(rep.reject, rep.p_value < alpha);
    }
  }
}

TEST(RelativeTest, NegativeUstatVarianceIsDegenerate) {
  Rng rng(4);
  for (int r = 0; r < 5000; ++r) {
    Matrix h = Matrix::Constant(6, 6, 1.0) + 1e-3 * random_symmetric(6, rng);
    const SteinGram g = make_gram(h);
    const TestReport rep = relative_test_diff(g, TestConfig{0.05, VarianceMethod::UStat});
    if (rep.sigma_sq_raw < 0.0) {
      EXPECT_TRUE(rep.degenerate);
      EXPECT_FALSE(rep.reject);
      EXPECT_EQ(rep.p_value, 1.0);
      return;
    }
  }
  FAIL() << "no negative variance estimate produced";
}

TEST(RelativeTest, Preconditions) {
  EXPECT_THROW(relative_test_diff(synthetic_gram(), TestConfig{0.0}), std::invalid_argument);
  EXPECT_THROW(relative_test_diff(synthetic_gram(), TestConfig{0.6}), std::invalid_argument);
  EXPECT_THROW(relative_test(make_gram(Matrix::Zero(4, 4)), make_gram(Matrix::Zero(5, 5)), TestConfig{}),
               std::invalid_argument);
  EXPECT_THROW(relative_test_diff(make_gram(Matrix::Zero(3, 3)), TestConfig{0.05, VarianceMethod::UStat}),
               std::invalid_argument);
}

TEST(TestReportJson, CarriesEveryField) {
  const auto j = to_json(relative_test_diff(synthetic_gram(), TestConfig{0.05}));
  for (const char* key : {"schema_version", "n", "alpha", "variance_method", "u_diff", "sigma",
                          "sigma_sq_raw", "statistic", "threshold", "reject", "degenerate", "p_value"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["variance_method"], "vstat");
  const auto d = to_json(relative_test_diff(make_gram(Matrix::Zero(5, 5)), TestConfig{}));
  EXPECT_TRUE(d["statistic"].is_null());
  EXPECT_TRUE(d["degenerate"].get<bool>());
}
