#include "steincmp/estimators.hpp"

#include <cmath>

namespace steincmp {

namespace {

struct GramSums {
  Vector row_sums;     // H1, or Hbar1 when the diagonal is excluded
  double row_sq = 0;   // |H1|^2
  double total = 0;    // 1'H1
  double frob_sq = 0;  // |H|_F^2
};

GramSums gram_sums(const Matrix& h, bool include_diagonal) {
  const Eigen::Index n = h.rows();
  GramSums s;
  s.row_sums.resize(n);
  CompensatedSum row_sq, total, frob;
  for (Eigen::Index i = 0; i < n; ++i) {
    CompensatedSum row;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!include_diagonal && i == j) continue;
      const double v = h(i, j);
      row.add(v);
      frob.add(v * v);
    }
    s.row_sums(i) = row.value();
    row_sq.add(s.row_sums(i) * s.row_sums(i));
    total.add(s.row_sums(i));
  }
  s.row_sq = row_sq.value();
  s.total = total.value();
  s.frob_sq = frob.value();
  return s;
}

void require_square(const SteinGram& gram, const char* op) {
  if (gram.h.rows() != gram.h.cols()) {
    throw std::invalid_argument(std::string(op) + ": gram must be square");
  }
}

}  // namespace

std::string to_string(VarianceMethod method) {
  return method == VarianceMethod::UStat ? "ustat" : "vstat";
}

VarianceMethod variance_method_from_string(const std::string& name) {
  if (name == "ustat" || name == "u" || name == "UStat") return VarianceMethod::UStat;
  if (name == "vstat" || name == "v" || name == "VStat") return VarianceMethod::VStat;
  throw std::invalid_argument("unknown variance method '" + name + "'");
}

KsdEstimate ksd_ustat(const SteinGram& gram) {
  require_square(gram, "ksd_ustat");
  const Eigen::Index n = gram.size();
  if (n < 2) throw std::invalid_argument("ksd_ustat: need n >= 2");
  CompensatedSum sum;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j) sum.add(gram.h(i, j));
    }
  }
  const double nn = static_cast<double>(n);
  return {sum.value() / (nn * (nn - 1.0)), n};
}

VarianceEstimate var_ustat(const SteinGram& gram) {
  require_square(gram, "var_ustat");
  const Eigen::Index n = gram.size();
  if (n < 4) throw std::invalid_argument("var_ustat: need n >= 4");
  const GramSums s = gram_sums(gram.h, false);
  const double nn = static_cast<double>(n);
  const double n3 = nn * (nn - 1.0) * (nn - 2.0);
  const double n4 = n3 * (nn - 3.0);

  VarianceEstimate v;
  v.method = VarianceMethod::UStat;
  v.a = (s.row_sq - s.frob_sq) / n3;
  v.b = (s.total * s.total - 4.0 * s.row_sq + 2.0 * s.frob_sq) / n4;
  v.c = s.frob_sq / (nn * (nn - 1.0));
  v.sigma_sq = 4.0 * (nn - 2.0) / (nn - 1.0) * (v.a - v.b) + 2.0 / (nn - 1.0) * (v.c - v.b);
  v.negative = v.sigma_sq < 0.0;
  return v;
}

VarianceEstimate var_vstat(const SteinGram& gram) {
  require_square(gram, "var_vstat");
  const Eigen::Index n = gram.size();
  if (n < 2) throw std::invalid_argument("var_vstat: need n >= 2");
  if (!gram.diag_valid) {
    throw std::invalid_argument("var_vstat: gram diagonal was not computed");
  }
  const GramSums s = gram_sums(gram.h, true);
  const double nn = static_cast<double>(n);

  VarianceEstimate v;
  v.method = VarianceMethod::VStat;
  v.a = s.row_sq / (nn * nn * nn);
  v.b = s.total * s.total / (nn * nn * nn * nn);
  // A - B = sum_i (r_i - mean r)^2 / n^3, evaluated in centred form so the result
  // cannot go negative through cancellation.
  const double mean_row = s.total / nn;
  CompensatedSum centred;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = s.row_sums(i) - mean_row;
    centred.add(d * d);
  }
  v.sigma_sq = 4.0 * (nn - 2.0) / (nn - 1.0) * centred.value() / (nn * nn * nn);
  return v;
}

VarianceEstimate estimate_variance(const SteinGram& gram, VarianceMethod method) {
  return method == VarianceMethod::UStat ? var_ustat(gram) : var_vstat(gram);
}

KsdEstimate ksd_exact(const MarginalScoreFn& score_fn, const Dataset& data,
                      const KernelSpec& kernel) {
  return ksd_ustat(stein_gram(marginal_scores(score_fn, data), data, kernel));
}

}  // namespace steincmp
