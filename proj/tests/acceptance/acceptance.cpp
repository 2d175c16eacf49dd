// Acceptance checks. `acceptance <criterion>` runs one check, `acceptance` runs them all.
// Each check prints exactly one PASS/FAIL line on stdout; progress goes to stderr.

#include "steincmp/harness.hpp"
#include "steincmp/oracles.hpp"
#include "test_support.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

using namespace steincmp;
using steincmp::testing::make_gram;
using steincmp::testing::mc_mmd_sq_diff;
using steincmp::testing::pt;
using steincmp::testing::random_symmetric;
using steincmp::testing::rel_err;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string rate_str(const RejectionRow& row) {
  std::ostringstream os;
  os << "n=" << row.n << " " << row.method << " " << fmt("%.3f", row.rate) << " ["
     << fmt("%.3f", row.ci.lo) << "," << fmt("%.3f", row.ci.hi) << "]";
  return os.str();
}

RejectionTable run_logged(const ExperimentConfig& cfg) {
  std::cerr << "running " << cfg.name << " (" << cfg.trials << " trials, n =";
  for (int n : cfg.n) std::cerr << ' ' << n;
  std::cerr << ")\n";
  return run_experiment(cfg, &std::cerr);
}

// ---------------------------------------------------------------------------------------

Verdict ppca_close_models_type1() {
  ExperimentConfig cfg = ExperimentConfig::defaults(Family::Ppca);
  cfg.name = "ppca-close";
  cfg.include_exact = false;
  const RejectionTable table = run_logged(cfg);
  Verdict v{true, ""};
  for (int n : cfg.n) {
    const RejectionRow& row = table.find(n, 0.05, "LKSD-V");
    v.pass = v.pass && row.rate <= 0.03 && row.ci.hi < 0.08;
    v.detail += rate_str(row) + "; ";
  }
  v.detail += "need rate <= 0.03 and Wilson upper < 0.08";
  return v;
}

Verdict ppca_power() {
  ExperimentConfig cfg = ExperimentConfig::defaults(Family::Ppca);
  cfg.name = "ppca-power";
  cfg.delta_p = 3.0;
  cfg.delta_q = 1.0;
  cfg.include_exact = true;
  const RejectionTable table = run_logged(cfg);
  Verdict v{true, ""};
  for (int n : cfg.n) {
    const RejectionRow& lksd = table.find(n, 0.05, "LKSD-V");
    const RejectionRow& exact = table.find(n, 0.05, "KSD-exact");
    v.pass = v.pass && std::abs(lksd.rate - exact.rate) <= 0.1;
    v.detail += rate_str(lksd) + " vs " + fmt("%.3f", exact.rate) + " exact; ";
  }
  v.pass = v.pass && table.find(300, 0.05, "LKSD-V").rate >= 0.90;
  v.detail += "need rate(300) >= 0.90 and |LKSD - exact| <= 0.1";
  return v;
}

Verdict lda_close_models_type1() {
  ExperimentConfig cfg = ExperimentConfig::defaults(Family::Lda);
  cfg.name = "lda-close";
  const RejectionTable table = run_logged(cfg);
  Verdict v{true, ""};
  for (int n : cfg.n) {
    const RejectionRow& row = table.find(n, 0.05, "LKSD-V");
    v.pass = v.pass && row.rate <= 0.05;
    v.detail += rate_str(row) + "; ";
  }
  v.detail += "need rate <= 0.05";
  return v;
}

Verdict lda_power() {
  ExperimentConfig cfg = ExperimentConfig::defaults(Family::Lda);
  cfg.name = "lda-power";
  cfg.delta_p = 1.0;
  cfg.delta_q = 0.8;
  const RejectionTable table = run_logged(cfg);
  Verdict v{true, ""};
  double prev = -1.0;
  for (int n : cfg.n) {
    const RejectionRow& row = table.find(n, 0.05, "LKSD-V");
    v.pass = v.pass && row.rate > prev;
    prev = row.rate;
    v.detail += rate_str(row) + "; ";
  }
  const double last = table.find(300, 0.05, "LKSD-V").rate;
  v.pass = v.pass && last >= 0.50 && last <= 0.85;
  v.detail += "need strictly increasing and rate(300) in [0.50, 0.85]";
  return v;
}

Verdict identical_models_variance() {
  ExperimentConfig cfg = ExperimentConfig::defaults(Family::Ppca);
  cfg.name = "ppca-identical";
  cfg.delta_p = 1.0;
  cfg.delta_q = 1.0;
  cfg.n = {300};
  cfg.include_exact = false;
  std::cerr << "running " << cfg.name << " (" << cfg.trials << " trials, n = 300)\n";
  const RejectionTable table = run_identical_models(cfg, &std::cerr);
  const RejectionRow& u = table.find(300, 0.05, "LKSD-U");
  const RejectionRow& vs = table.find(300, 0.05, "LKSD-V");
  return {u.rate > vs.rate, rate_str(u) + " (" + std::to_string(u.degenerate) + " degenerate); " +
                                rate_str(vs) + "; need U rate > V rate"};
}

Verdict estimator_oracles() {
  Rng rng(20240601);
  double worst = 0.0;
  for (int n = 4; n <= 8; ++n) {
    for (int rep = 0; rep < 100; ++rep) {
      const SteinGram g = make_gram(random_symmetric(n, rng));
      const VarComponents brute = brute_var_components(g);
      const VarianceEstimate u = var_ustat(g);
      const VarianceEstimate vs = var_vstat(g);
      for (double e : {rel_err(u.a, brute.a), rel_err(u.b, brute.b), rel_err(u.c, brute.c),
                       rel_err(vs.a, brute.a_v), rel_err(vs.b, brute.b_v)}) {
        worst = std::max(worst, e);
      }
    }
  }
  int negative = 0;
  std::uniform_int_distribution<int> size(2, 40);
  std::uniform_real_distribution<double> offset(-5.0, 5.0);
  for (int rep = 0; rep < 10000; ++rep) {
    Matrix h = random_symmetric(size(rng), rng, std::exp(offset(rng)));
    h.array() += offset(rng);
    if (var_vstat(make_gram(h)).sigma_sq < 0.0) ++negative;
  }
  return {worst <= 1e-10 && negative == 0,
          "max relative error " + fmt("%.2e", worst) + " (need <= 1e-10); negative V-stat variances " +
              std::to_string(negative) + " of 10000"};
}

Verdict score_identity() {
  const PpcaModel model = PpcaModel::random_uniform(50, 10, 1.0, 101);
  const Dataset data = model.sample(20, 102);
  const Eigen::Index m = 100000;
  double worst = 0.0;
  int misses = 0;
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const LatentBatch b = model.posterior_exact(data.row(i), m, derive_seed(103, static_cast<std::uint64_t>(i), 0));
    Vector sum = Vector::Zero(50);
    Vector sum_sq = Vector::Zero(50);
    for (Eigen::Index j = 0; j < m; ++j) {
      const Vector s = model.cond_score(data.row(i), b.draw(j));
      sum += s;
      sum_sq += s.cwiseProduct(s);
    }
    const Vector mean = sum / static_cast<double>(m);
    const Vector var = sum_sq / static_cast<double>(m) - mean.cwiseProduct(mean);
    const Vector exact = model.marginal_score(data.row(i));
    for (int d = 0; d < 50; ++d) {
      const double z = std::abs(mean(d) - exact(d)) / std::sqrt(var(d) / static_cast<double>(m));
      worst = std::max(worst, z);
      if (z > 4.0) ++misses;
    }
  }
  return {misses == 0, "20 x 50 components, largest deviation " + fmt("%.2f", worst) +
                           " standard errors (need every component within 4)"};
}

// Mean and batch-means standard error of a chain.
std::pair<double, double> batch_mean_se(const Vector& x, int batches = 50) {
  const Eigen::Index len = x.size() / batches;
  Vector means(batches);
  for (int b = 0; b < batches; ++b) means(b) = x.segment(b * len, len).mean();
  const double mean = means.mean();
  const double var = (means.array() - mean).square().sum() / (batches - 1);
  return {mean, std::sqrt(var / batches)};
}

Verdict sampler_correctness() {
  // LDA collapsed Gibbs against enumeration on K = D = L = 2.
  double worst_tv = 0.0;
  for (std::uint64_t rep = 0; rep < 5; ++rep) {
    const LdaModel model = LdaModel::with_random_topics(2, 2, 0.1 + 0.5 * static_cast<double>(rep), 300 + rep);
    const std::vector<double> doc{static_cast<double>(rep % 2), static_cast<double>((rep / 2) % 2)};
    const LdaPosteriorTable table = enumerate_lda_posterior(model, pt(doc));
    const LatentBatch batch = model.collapsed_gibbs(pt(doc), 100000, 1000, 400 + rep);
    std::vector<double> freq(table.probs.size(), 0.0);
    for (Eigen::Index r = 0; r < batch.size(); ++r) {
      const std::vector<int> a{static_cast<int>(batch.draws(r, 0)), static_cast<int>(batch.draws(r, 1))};
      freq[table.index_of(a)] += 1.0 / static_cast<double>(batch.size());
    }
    double tv = 0.0;
    for (std::size_t s = 0; s < freq.size(); ++s) tv += 0.5 * std::abs(freq[s] - table.probs[s]);
    worst_tv = std::max(worst_tv, tv);
  }

  // PPCA MALA against the exact posterior.
  const PpcaModel model = PpcaModel::random_uniform(50, 10, 1.0, 500);
  const Vector x = model.sample(1, 501).points.row(0).transpose();
  MalaParams params;
  params.thin = 10;
  const LatentBatch b = model.posterior_mcmc(pt(x), 5000, 5000, params, 502);
  const Vector mean = model.posterior_mean(pt(x));
  const Matrix cov = model.posterior_cov();
  double worst_z = 0.0;
  for (int k = 0; k < 10; ++k) {
    const auto [m1, se1] = batch_mean_se(b.draws.col(k));
    worst_z = std::max(worst_z, std::abs(m1 - mean(k)) / se1);
    const Vector sq = b.draws.col(k).array().square();
    const auto [m2, se2] = batch_mean_se(sq);
    worst_z = std::max(worst_z, std::abs(m2 - (cov(k, k) + mean(k) * mean(k))) / se2);
  }
  return {worst_tv <= 0.02 && worst_z <= 3.0,
          "LDA Gibbs worst TV " + fmt("%.4f", worst_tv) + " (need <= 0.02); MALA worst moment deviation " +
              fmt("%.2f", worst_z) + " SE (need <= 3), acceptance " + fmt("%.2f", b.acceptance_rate)};
}

Verdict gaussian_oracles() {
  Rng rng(600);
  auto random_spd = [&](Eigen::Index d) {
    Matrix g(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) g(i, j) = standard_normal(rng);
    }
    Matrix s = g * g.transpose() / static_cast<double>(d) + 0.5 * Matrix::Identity(d, d);
    return Matrix(0.5 * (s + s.transpose()));
  };

  double worst_mmd = 0.0;
  for (int rep = 0; rep < 5; ++rep) {
    const Eigen::Index d = 1 + rep % 3;
    const GaussianSpec p(random_spd(d));
    const GaussianSpec q(random_spd(d));
    const GaussianSpec r(random_spd(d));
    const double lambda = 0.5 + 0.5 * rep;
    const MonteCarloValue mc = mc_mmd_sq_diff(p, q, r, lambda, 100000, 610 + static_cast<std::uint64_t>(rep));
    worst_mmd = std::max(worst_mmd, std::abs(mc.estimate - gaussian_mmd_sq_diff(p, q, r, Bandwidth(lambda))) / mc.std_error);
  }

  // KSD of a PPCA marginal against N(0, I) data: Monte Carlo oracle vs the exact-score
  // U-statistic averaged over independent datasets.
  double worst_ksd = 0.0;
  for (int rep = 0; rep < 3; ++rep) {
    const PpcaModel model = PpcaModel::random_uniform(4, 2, 1.0, 620 + static_cast<std::uint64_t>(rep));
    const GaussianSpec p(model.marginal_cov());
    const GaussianSpec r(random_spd(4));
    const KernelSpec k = KernelSpec::gaussian_sq(Bandwidth(1.0 + rep));
    const MonteCarloValue oracle = gaussian_ksd_sq(p, r, k, 1000000, 630 + static_cast<std::uint64_t>(rep));
    const Matrix chol = r.cov.llt().matrixL();
    const int reps = 40;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int j = 0; j < reps; ++j) {
      Rng drng(derive_seed(640 + static_cast<std::uint64_t>(rep), static_cast<std::uint64_t>(j), 0));
      RowMatrix xs(300, 4);
      for (Eigen::Index i = 0; i < xs.rows(); ++i) xs.row(i) = (chol * standard_normal(4, drng)).transpose();
      const double e = ksd_exact(model.marginal_score_fn(), Dataset(xs), k).u_stat;
      sum += e;
      sum_sq += e * e;
    }
    const double mean = sum / reps;
    const double se = std::sqrt((sum_sq - reps * mean * mean) / (reps - 1) / reps);
    worst_ksd = std::max(worst_ksd, std::abs(mean - oracle.estimate) / std::hypot(se, oracle.std_error));
  }
  return {worst_mmd <= 4.0 && worst_ksd <= 4.0,
          "MMD closed form vs Monte Carlo worst " + fmt("%.2f", worst_mmd) +
              " SE; Gaussian KSD vs exact-score U-statistic worst " + fmt("%.2f", worst_ksd) +
              " combined SE (need <= 4 each)"};
}

Verdict gdpm_direction() {
  auto rate_at = [](double delta) {
    ExperimentConfig cfg = ExperimentConfig::defaults(Family::Gdpm);
    cfg.name = "gdpm-delta-" + fmt("%.1f", delta);
    cfg.delta_p = delta;
    cfg.delta_q = 1.0;
    return run_logged(cfg).find(200, 0.05, "LKSD-V");
  };
  const RejectionRow low = rate_at(0.5);
  const RejectionRow high = rate_at(1.5);
  return {high.rate > low.rate && low.rate <= 0.10,
          "delta 0.5: " + rate_str(low) + "; delta 1.5: " + rate_str(high) +
              "; need rate(1.5) > rate(0.5) and rate(0.5) <= 0.10"};
}

const std::map<std::string, std::function<Verdict()>>& criteria() {
  static const std::map<std::string, std::function<Verdict()>> all{
      {"ppca_close_models_type1", ppca_close_models_type1},
      {"ppca_power", ppca_power},
      {"lda_close_models_type1", lda_close_models_type1},
      {"lda_power", lda_power},
      {"identical_models_variance", identical_models_variance},
      {"estimator_oracles", estimator_oracles},
      {"score_identity", score_identity},
      {"sampler_correctness", sampler_correctness},
      {"gaussian_oracles", gaussian_oracles},
      {"gdpm_direction", gdpm_direction},
  };
  return all;
}

bool run_one(const std::string& name) {
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = criteria().at(name)();
  } catch (const std::exception& e) {
    v = {false, std::string("error: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail << " (" << fmt("%.0f", secs)
            << "s)" << std::endl;
  return v.pass;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 2) {
    std::cerr << "usage: acceptance [criterion]\n";
    return 2;
  }
  if (argc == 2) {
    if (!criteria().contains(argv[1])) {
      std::cerr << "unknown criterion '" << argv[1] << "'; known:";
      for (const auto& [name, fn] : criteria()) std::cerr << ' ' << name;
      std::cerr << '\n';
      return 2;
    }
    return run_one(argv[1]) ? 0 : 1;
  }
  bool all = true;
  for (const auto& [name, fn] : criteria()) all = run_one(name) && all;
  return all ? 0 : 1;
}
