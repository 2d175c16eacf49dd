#include "steincmp/cli.hpp"

#include "steincmp/harness.hpp"
#include "steincmp/oracles.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

namespace steincmp {

using nlohmann::json;

namespace {

struct TestOptions {
  std::string data;
  std::string model_p;
  std::string model_q;
  double alpha = 0.05;
  std::string variance = "vstat";
  int m = 200;
  int t = 100;
  std::uint64_t seed = 1;
  bool ppca_exact = false;
  double bandwidth = 0.0;
};

struct ExperimentOptions {
  std::string config;
  std::string out;
  bool paper_scale = false;
};

struct GramOptions {
  std::string data;
  std::string model;
  std::string out;
  std::string format = "csv";
  int m = 200;
  int t = 100;
  std::uint64_t seed = 1;
  bool ppca_exact = false;
  double bandwidth = 0.0;
};

struct OracleOptions {
  std::string p;
  std::string q;
  std::string r;
  double lambda = 1.0;
  std::string kernel = "gaussian-sq";
  long mc_n = 100000;
  std::uint64_t seed = 1;
};

GaussianSpec gaussian_from_file(const std::string& path) {
  const json j = read_json_file(path);
  try {
    const json& cov = j.is_object() ? j.at("cov") : j;
    const auto rows = cov.get<std::vector<std::vector<double>>>();
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.size()) throw ConfigError(path + ": covariance must be square");
      for (std::size_t c = 0; c < rows.size(); ++c) {
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
      }
    }
    if (j.is_object() && j.contains("mean")) {
      const auto mean = j.at("mean").get<std::vector<double>>();
      return GaussianSpec(Eigen::Map<const Vector>(mean.data(), static_cast<Eigen::Index>(mean.size())), m);
    }
    return GaussianSpec(m);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

int vocab_of(const AnyModel& model) {
  if (const auto* lda = std::get_if<LdaModel>(&model)) return lda->vocab_size();
  return 0;
}

KernelSpec kernel_for(const Dataset& data, double bandwidth) {
  if (bandwidth > 0.0 && !data.discrete()) return KernelSpec::gaussian_sq(Bandwidth(bandwidth));
  return default_kernel(data);
}

SteinGram model_gram(const AnyModel& model, const Dataset& data, const KernelSpec& kernel,
                     const SamplerSettings& sampler, std::uint64_t seed) {
  const auto latents = draw_latents(model, data, sampler, seed);
  return stein_gram(average_scores(score_function(model, data), data, latents), data, kernel);
}

int run_test(const TestOptions& o) {
  const AnyModel p = model_from_json(read_json_file(o.model_p));
  const AnyModel q = model_from_json(read_json_file(o.model_q));
  if (p.index() != q.index()) throw ConfigError("--model-p and --model-q are different families");
  const Dataset data = read_dataset_csv(o.data, vocab_of(p));
  const TestConfig cfg{o.alpha, variance_method_from_string(o.variance), o.m, o.t};
  cfg.validate();
  const KernelSpec kernel = kernel_for(data, o.bandwidth);
  const SamplerSettings sampler{o.m, o.t, o.ppca_exact};
  const SteinGram gram_p = model_gram(p, data, kernel, sampler, derive_seed(o.seed, 0, 1));
  const SteinGram gram_q = model_gram(q, data, kernel, sampler, derive_seed(o.seed, 0, 2));
  json report = to_json(relative_test(gram_p, gram_q, cfg));
  report["kernel"] = {{"kind", to_string(kernel.kind)}, {"lambda", kernel.lambda}};
  std::cout << report.dump(2) << '\n';
  return 0;
}

int run_experiment_cmd(const ExperimentOptions& o) {
  ExperimentConfig cfg = config_from_json(read_json_file(o.config));
  if (o.paper_scale) cfg.use_paper_scale();
  const RejectionTable table = cfg.scenario == Scenario::Identical
                                   ? run_identical_models(cfg, &std::cerr)
                                   : run_experiment(cfg, &std::cerr);
  write_artifacts(table, cfg, o.out);
  std::cout << table.to_csv();
  return 0;
}

int run_gram(const GramOptions& o) {
  const AnyModel model = model_from_json(read_json_file(o.model));
  const Dataset data = read_dataset_csv(o.data, vocab_of(model));
  if (o.format != "csv" && o.format != "bin") throw ConfigError("--format must be csv or bin");
  const SteinGram gram = model_gram(model, data, kernel_for(data, o.bandwidth),
                                    SamplerSettings{o.m, o.t, o.ppca_exact}, derive_seed(o.seed, 0, 1));
  if (o.format == "csv") {
    write_gram_csv(gram, o.out);
  } else {
    write_gram_binary(gram, o.out);
  }
  return 0;
}

int run_mmd_diff(const OracleOptions& o) {
  const double value = gaussian_mmd_sq_diff(gaussian_from_file(o.p), gaussian_from_file(o.q),
                                            gaussian_from_file(o.r), Bandwidth(o.lambda));
  std::printf("%.17g\n", value);
  return 0;
}

int run_ksd_oracle(const OracleOptions& o) {
  const KernelKind kind = kernel_kind_from_string(o.kernel);
  if (kind != KernelKind::GaussianSq && kind != KernelKind::GaussianHalf) {
    throw ConfigError("--kernel must be gaussian-sq or gaussian-half");
  }
  const KernelSpec kernel{kind, Bandwidth(o.lambda).value(), 0};
  const MonteCarloValue v =
      gaussian_ksd_sq(gaussian_from_file(o.p), gaussian_from_file(o.r), kernel, o.mc_n, o.seed);
  std::cout << json{{"estimate", v.estimate}, {"std_error", v.std_error}}.dump() << '\n';
  return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Relative goodness-of-fit testing for latent-variable models"};
  app.require_subcommand(1);

  TestOptions test_opts;
  auto* test = app.add_subcommand("test", "Run one relative test of two models on a data file");
  test->add_option("--data", test_opts.data, "Headerless CSV, one observation per row")->required();
  test->add_option("--model-p", test_opts.model_p, "Model P (JSON)")->required();
  test->add_option("--model-q", test_opts.model_q, "Model Q (JSON)")->required();
  test->add_option("--alpha", test_opts.alpha, "Significance level")->capture_default_str();
  test->add_option("--variance", test_opts.variance, "ustat or vstat")->capture_default_str();
  test->add_option("--m", test_opts.m, "Latent draws per observation")->capture_default_str();
  test->add_option("--t", test_opts.t, "Burn-in transitions")->capture_default_str();
  test->add_option("--seed", test_opts.seed, "Master seed")->capture_default_str();
  test->add_option("--bandwidth", test_opts.bandwidth, "Gaussian bandwidth (default: median heuristic)");
  test->add_flag("--ppca-exact", test_opts.ppca_exact, "Exact posterior draws for PPCA models");

  ExperimentOptions exp_opts;
  auto* experiment = app.add_subcommand("experiment", "Run a rejection-rate experiment");
  experiment->add_option("--config", exp_opts.config, "Experiment config (JSON)")->required();
  experiment->add_option("--out", exp_opts.out, "Output directory")->required();
  experiment->add_flag("--paper-scale", exp_opts.paper_scale, "300 trials and full sampler settings");

  GramOptions gram_opts;
  auto* gram = app.add_subcommand("gram", "Dump the Stein kernel matrix of one model");
  gram->add_option("--data", gram_opts.data, "Headerless CSV, one observation per row")->required();
  gram->add_option("--model", gram_opts.model, "Model (JSON)")->required();
  gram->add_option("--out", gram_opts.out, "Output file")->required();
  gram->add_option("--format", gram_opts.format, "csv or bin")->capture_default_str();
  gram->add_option("--m", gram_opts.m, "Latent draws per observation")->capture_default_str();
  gram->add_option("--t", gram_opts.t, "Burn-in transitions")->capture_default_str();
  gram->add_option("--seed", gram_opts.seed, "Master seed")->capture_default_str();
  gram->add_option("--bandwidth", gram_opts.bandwidth, "Gaussian bandwidth (default: median heuristic)");
  gram->add_flag("--ppca-exact", gram_opts.ppca_exact, "Exact posterior draws for PPCA models");

  OracleOptions oracle_opts;
  auto* oracle = app.add_subcommand("oracle", "Closed-form Gaussian reference values");
  oracle->require_subcommand(1);
  auto* mmd = oracle->add_subcommand("mmd-diff", "MMD^2(p, r) - MMD^2(q, r) for zero-mean Gaussians");
  mmd->add_option("--p", oracle_opts.p, "Covariance of p (JSON)")->required();
  mmd->add_option("--q", oracle_opts.q, "Covariance of q (JSON)")->required();
  mmd->add_option("--r", oracle_opts.r, "Covariance of r (JSON)")->required();
  mmd->add_option("--lambda", oracle_opts.lambda, "Kernel bandwidth")->required();
  auto* ksd = oracle->add_subcommand("ksd", "Monte Carlo KSD^2 of N(0, cov_p) against N(0, cov_r)");
  ksd->add_option("--p", oracle_opts.p, "Covariance of p (JSON)")->required();
  ksd->add_option("--r", oracle_opts.r, "Covariance of r (JSON)")->required();
  ksd->add_option("--lambda", oracle_opts.lambda, "Kernel bandwidth")->required();
  ksd->add_option("--kernel", oracle_opts.kernel, "gaussian-sq or gaussian-half")->capture_default_str();
  ksd->add_option("--mc-n", oracle_opts.mc_n, "Monte Carlo pairs")->capture_default_str();
  ksd->add_option("--seed", oracle_opts.seed, "Seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*test) return run_test(test_opts);
    if (*experiment) return run_experiment_cmd(exp_opts);
    if (*gram) return run_gram(gram_opts);
    if (*mmd) return run_mmd_diff(oracle_opts);
    if (*ksd) return run_ksd_oracle(oracle_opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    // Input validation failures (bad model parameters, mismatched dimensions).
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace steincmp
