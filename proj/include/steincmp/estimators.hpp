#pragma once

#include "steincmp/stein.hpp"

namespace steincmp {

struct KsdEstimate {
  double u_stat = 0.0;
  Eigen::Index n = 0;
};

enum class VarianceMethod { UStat, VStat };

std::string to_string(VarianceMethod method);
VarianceMethod variance_method_from_string(const std::string& name);

/// Estimate of the asymptotic variance of sqrt(n) * U_n.
///
/// UStat: a/b/c are the unbiased A, B, C estimates computed on the gram with its
/// diagonal zeroed; sigma_sq may be negative, in which case `negative` is set and the
/// value is left untouched for the caller to handle.
/// VStat: a/b are the V-statistic A and B on the full gram; c is unused (zero).
struct VarianceEstimate {
  double sigma_sq = 0.0;
  VarianceMethod method = VarianceMethod::VStat;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  bool negative = false;
};

/// Mean of the off-diagonal entries.
KsdEstimate ksd_ustat(const SteinGram& gram);

VarianceEstimate var_ustat(const SteinGram& gram);
VarianceEstimate var_vstat(const SteinGram& gram);
VarianceEstimate estimate_variance(const SteinGram& gram, VarianceMethod method);

/// KSD U-statistic with exact marginal scores.
KsdEstimate ksd_exact(const MarginalScoreFn& score_fn, const Dataset& data,
                      const KernelSpec& kernel);

}  // namespace steincmp
