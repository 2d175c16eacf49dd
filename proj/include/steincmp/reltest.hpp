#pragma once

#include "steincmp/estimators.hpp"

#include <nlohmann/json.hpp>

namespace steincmp {

/// Standard normal CDF.
double normal_cdf(double x);

/// Inverse standard normal CDF on (0, 1); absolute error below 1e-9.
double normal_quantile(double p);

struct TestConfig {
  double alpha = 0.05;
  VarianceMethod variance_method = VarianceMethod::VStat;
  int m = 200;  // latent draws per observation (recorded, used by callers that sample)
  int t = 100;  // burn-in transitions

  void validate() const;
};

/// Outcome of one relative goodness-of-fit test of H0: KSD_p <= KSD_q.
struct TestReport {
  double u_diff = 0.0;
  double sigma = 0.0;
  double statistic = 0.0;  // sqrt(n) * u_diff / sigma; NaN when degenerate
  double threshold = 0.0;  // (1 - alpha) standard normal quantile
  bool reject = false;
  bool degenerate = false;
  double p_value = 1.0;
  double alpha = 0.05;
  Eigen::Index n = 0;
  VarianceMethod variance_method = VarianceMethod::VStat;
  double sigma_sq_raw = 0.0;  // estimator output before any degeneracy handling
};

TestReport relative_test(const SteinGram& gram_p, const SteinGram& gram_q, const TestConfig& cfg);

/// Same decision on a precomputed difference gram.
TestReport relative_test_diff(const SteinGram& diff, const TestConfig& cfg);

nlohmann::json to_json(const TestReport& report);

}  // namespace steincmp
