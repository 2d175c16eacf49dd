#include "steincmp/oracles.hpp"

#include "steincmp/parallel.hpp"
#include "steincmp/random.hpp"

#include <algorithm>
#include <cmath>

namespace steincmp {

namespace {

void check_covariance(const Matrix& cov) {
  if (cov.rows() != cov.cols() || cov.rows() < 1) {
    throw std::invalid_argument("GaussianSpec: covariance must be square and non-empty");
  }
  if (!cov.allFinite()) throw std::invalid_argument("GaussianSpec: non-finite covariance");
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("GaussianSpec: covariance is not symmetric");
  }
  if (cov.llt().info() != Eigen::Success) {
    throw std::invalid_argument("GaussianSpec: covariance is not positive definite");
  }
}

void require_zero_mean(const GaussianSpec& g, const char* name) {
  if (g.mean.cwiseAbs().maxCoeff() != 0.0) {
    throw std::invalid_argument(std::string("gaussian_mmd_sq_diff: ") + name +
                                " must be zero-mean");
  }
}

}  // namespace

GaussianSpec::GaussianSpec(Vector mean_, Matrix cov_) : mean(std::move(mean_)), cov(std::move(cov_)) {
  check_covariance(cov);
  if (mean.size() != cov.rows()) {
    throw std::invalid_argument("GaussianSpec: mean and covariance dimensions differ");
  }
}

GaussianSpec::GaussianSpec(Matrix cov_) : mean(Vector::Zero(cov_.rows())), cov(std::move(cov_)) {
  check_covariance(cov);
}

double log_det_spd(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw std::domain_error("log_det_spd: matrix is not positive definite");
  }
  const Matrix& lower = llt.matrixLLT();
  double total = 0.0;
  for (Eigen::Index i = 0; i < lower.rows(); ++i) total += std::log(lower(i, i));
  return 2.0 * total;
}

double gaussian_mmd_sq_diff(const GaussianSpec& p, const GaussianSpec& q, const GaussianSpec& r,
                            Bandwidth lambda) {
  const Eigen::Index dim = p.dim();
  if (q.dim() != dim || r.dim() != dim) {
    throw std::invalid_argument("gaussian_mmd_sq_diff: dimension mismatch");
  }
  require_zero_mean(p, "p");
  require_zero_mean(q, "q");
  require_zero_mean(r, "r");

  const double lam_sq = lambda.value() * lambda.value();
  const Matrix shift = lam_sq * Matrix::Identity(dim, dim);
  // E k(x, x') for x - x' ~ N(0, S) is lambda^D |S + lambda^2 I|^(-1/2).
  const double log_scale = static_cast<double>(dim) * std::log(lam_sq);
  auto term = [&](const Matrix& m) { return std::exp(0.5 * (log_scale - log_det_spd(m + shift))); };
  return term(2.0 * p.cov) - term(2.0 * q.cov) -
         2.0 * (term(p.cov + r.cov) - term(q.cov + r.cov));
}

MonteCarloValue gaussian_ksd_sq(const GaussianSpec& p, const GaussianSpec& r,
                                const KernelSpec& kernel, Eigen::Index mc_n, std::uint64_t seed) {
  if (p.dim() != r.dim()) throw std::invalid_argument("gaussian_ksd_sq: dimension mismatch");
  if (kernel.discrete()) throw std::invalid_argument("gaussian_ksd_sq: needs a continuous kernel");
  if (mc_n < 2) throw std::invalid_argument("gaussian_ksd_sq: need at least two Monte Carlo pairs");
  if (p.mean != r.mean) {
    throw std::invalid_argument("gaussian_ksd_sq: p and r must share their mean");
  }

  const Eigen::Index dim = p.dim();
  const Matrix eye = Matrix::Identity(dim, dim);
  const Matrix diff = p.cov.llt().solve(eye) - r.cov.llt().solve(eye);
  const Matrix diff_sq = diff * diff;
  const Matrix chol = r.cov.llt().matrixL();

  constexpr std::size_t chunks = 64;
  std::vector<double> sums(chunks, 0.0);
  std::vector<double> sums_sq(chunks, 0.0);
  parallel_for(chunks, [&](std::size_t c) {
    const Eigen::Index begin = mc_n * static_cast<Eigen::Index>(c) / static_cast<Eigen::Index>(chunks);
    const Eigen::Index end = mc_n * static_cast<Eigen::Index>(c + 1) / static_cast<Eigen::Index>(chunks);
    Rng rng(derive_seed(seed, c, 0));
    CompensatedSum s;
    CompensatedSum s2;
    for (Eigen::Index i = begin; i < end; ++i) {
      const Vector x1 = r.mean + chol * standard_normal(dim, rng);
      const Vector x2 = r.mean + chol * standard_normal(dim, rng);
      const double k = eval(kernel, Point(x1.data(), static_cast<std::size_t>(dim)),
                            Point(x2.data(), static_cast<std::size_t>(dim)));
      const double t = (x1 - r.mean).dot(diff_sq * (x2 - r.mean)) * k;
      s.add(t);
      s2.add(t * t);
    }
    sums[c] = s.value();
    sums_sq[c] = s2.value();
  });

  CompensatedSum total;
  CompensatedSum total_sq;
  for (std::size_t c = 0; c < chunks; ++c) {
    total.add(sums[c]);
    total_sq.add(sums_sq[c]);
  }
  const auto n = static_cast<double>(mc_n);
  const double mean = total.value() / n;
  const double var = std::max(0.0, (total_sq.value() - n * mean * mean) / (n - 1.0));
  return {mean, std::sqrt(var / n)};
}

VarComponents brute_var_components(const SteinGram& gram) {
  const Eigen::Index n = gram.size();
  if (n > 12) throw std::invalid_argument("brute_var_components: n must be <= 12");
  if (n < 4) throw std::invalid_argument("brute_var_components: n must be >= 4");
  const Matrix& h = gram.h;
  const auto nd = static_cast<double>(n);

  VarComponents out;
  CompensatedSum sa;
  CompensatedSum sb;
  CompensatedSum sc;
  double triples = 0.0;
  double quads = 0.0;
  double pairs = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      sc.add(h(i, j) * h(i, j));
      pairs += 1.0;
      for (Eigen::Index k = j + 1; k < n; ++k) {
        // h_a symmetrised over which index is shared
        sa.add((h(i, j) * h(i, k) + h(j, i) * h(j, k) + h(k, i) * h(k, j)) / 3.0);
        triples += 1.0;
        for (Eigen::Index l = k + 1; l < n; ++l) {
          // h_b symmetrised over the three pairings
          sb.add((h(i, j) * h(k, l) + h(i, k) * h(j, l) + h(i, l) * h(j, k)) / 3.0);
          quads += 1.0;
        }
      }
    }
  }
  out.a = sa.value() / triples;
  out.b = sb.value() / quads;
  out.c = sc.value() / pairs;

  CompensatedSum sav;
  CompensatedSum sbv;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index k = 0; k < n; ++k) {
        sav.add(h(i, j) * h(i, k));
        for (Eigen::Index l = 0; l < n; ++l) sbv.add(h(i, j) * h(k, l));
      }
    }
  }
  out.a_v = sav.value() / (nd * nd * nd);
  out.b_v = sbv.value() / (nd * nd * nd * nd);
  return out;
}

std::vector<int> LdaPosteriorTable::assignment(std::size_t index) const {
  std::vector<int> z(static_cast<std::size_t>(words));
  for (auto& zj : z) {
    zj = static_cast<int>(index % static_cast<std::size_t>(topics));
    index /= static_cast<std::size_t>(topics);
  }
  return z;
}

std::size_t LdaPosteriorTable::index_of(std::span<const int> assignment) const {
  std::size_t index = 0;
  for (std::size_t j = assignment.size(); j-- > 0;) {
    index = index * static_cast<std::size_t>(topics) + static_cast<std::size_t>(assignment[j]);
  }
  return index;
}

LdaPosteriorTable enumerate_lda_posterior(const LdaModel& model, Point doc) {
  const int topics = model.num_topics();
  const int words = static_cast<int>(doc.size());
  double states = 1.0;
  for (int j = 0; j < words; ++j) states *= topics;
  if (states > 4096.0) {
    throw std::invalid_argument("enumerate_lda_posterior: K^D exceeds 4096");
  }
  for (double v : doc) {
    if (v < 0 || v >= model.vocab_size() || v != std::floor(v)) {
      throw std::invalid_argument("enumerate_lda_posterior: word out of range");
    }
  }

  LdaPosteriorTable table;
  table.topics = topics;
  table.words = words;
  const auto count = static_cast<std::size_t>(states);
  std::vector<double> logp(count);
  const Vector& a = model.concentration();
  const double a_total = a.sum();
  const double log_norm = std::lgamma(a_total) - std::lgamma(a_total + words);
  std::vector<double> counts(static_cast<std::size_t>(topics));
  for (std::size_t s = 0; s < count; ++s) {
    const std::vector<int> z = table.assignment(s);
    std::fill(counts.begin(), counts.end(), 0.0);
    double lp = log_norm;
    for (int j = 0; j < words; ++j) {
      const int k = z[static_cast<std::size_t>(j)];
      counts[static_cast<std::size_t>(k)] += 1.0;
      lp += std::log(model.topics()(k, static_cast<Eigen::Index>(doc[static_cast<std::size_t>(j)])));
    }
    for (int k = 0; k < topics; ++k) {
      lp += std::lgamma(a(k) + counts[static_cast<std::size_t>(k)]) - std::lgamma(a(k));
    }
    logp[s] = lp;
  }
  const double top = *std::max_element(logp.begin(), logp.end());
  CompensatedSum total;
  table.probs.resize(count);
  for (std::size_t s = 0; s < count; ++s) {
    table.probs[s] = std::exp(logp[s] - top);
    total.add(table.probs[s]);
  }
  for (double& p : table.probs) p /= total.value();
  return table;
}

}  // namespace steincmp
