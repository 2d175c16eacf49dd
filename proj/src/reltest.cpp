#include "steincmp/reltest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace steincmp {

namespace {

// Acklam's rational approximation to the normal quantile (relative error ~1e-9).
double acklam_quantile(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("normal_quantile: p must lie in (0, 1)");
  }
  if (p == 0.5) return 0.0;
  double x = acklam_quantile(p);
  // One Halley step against erfc.
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

void TestConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 0.5)) {
    throw std::invalid_argument("TestConfig: alpha must lie in (0, 0.5]");
  }
  if (m < 1) throw std::invalid_argument("TestConfig: m must be >= 1");
  if (t < 0) throw std::invalid_argument("TestConfig: t must be >= 0");
}

TestReport relative_test(const SteinGram& gram_p, const SteinGram& gram_q, const TestConfig& cfg) {
  if (gram_p.size() != gram_q.size()) {
    throw std::invalid_argument("relative_test: grams were computed on different sample sizes");
  }
  return relative_test_diff(diff_gram(gram_p, gram_q), cfg);
}

TestReport relative_test_diff(const SteinGram& diff, const TestConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = diff.size();
  const VarianceEstimate var = estimate_variance(diff, cfg.variance_method);

  TestReport r;
  r.n = n;
  r.alpha = cfg.alpha;
  r.variance_method = cfg.variance_method;
  r.u_diff = ksd_ustat(diff).u_stat;
  r.threshold = normal_quantile(1.0 - cfg.alpha);
  r.sigma_sq_raw = var.sigma_sq;

  // sigma is treated as zero below 1e-14 * (mean |off-diagonal entry|)^2 * n.
  CompensatedSum abs_sum;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j) abs_sum.add(std::abs(diff.h(i, j)));
    }
  }
  const double nn = static_cast<double>(n);
  const double mean_abs = abs_sum.value() / (nn * (nn - 1.0));
  const double tolerance = 1e-14 * mean_abs * mean_abs * nn;

  if (!(var.sigma_sq > tolerance)) {
    r.degenerate = true;
    r.sigma = var.sigma_sq > 0.0 ? std::sqrt(var.sigma_sq) : 0.0;
    r.statistic = std::numeric_limits<double>::quiet_NaN();
    r.reject = false;
    r.p_value = 1.0;
    return r;
  }

  r.sigma = std::sqrt(var.sigma_sq);
  const double root_n = std::sqrt(nn);
  r.statistic = root_n * r.u_diff / r.sigma;
  r.reject = r.u_diff > (r.sigma / root_n) * r.threshold;
  r.p_value = std::clamp(0.5 * std::erfc(r.statistic / std::numbers::sqrt2), 0.0, 1.0);
  return r;
}

nlohmann::json to_json(const TestReport& report) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["n"] = report.n;
  j["alpha"] = report.alpha;
  j["variance_method"] = to_string(report.variance_method);
  j["u_diff"] = report.u_diff;
  j["sigma"] = report.sigma;
  j["sigma_sq_raw"] = report.sigma_sq_raw;
  if (std::isfinite(report.statistic)) {
    j["statistic"] = report.statistic;
  } else {
    j["statistic"] = nullptr;
  }
  j["threshold"] = report.threshold;
  j["reject"] = report.reject;
  j["degenerate"] = report.degenerate;
  j["p_value"] = report.p_value;
  return j;
}

}  // namespace steincmp
