#include "steincmp/harness.hpp"

#include "steincmp/parallel.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

namespace steincmp {

using nlohmann::json;

namespace {

// Seed roles under a trial seed.
enum SeedRole : std::uint64_t {
  kRoleTrial = 1,
  kRoleModel = 2,
  kRoleData = 3,
  kRoleLatentP = 4,
  kRoleLatentQ = 5,
  kRoleTraining = 6,
};

std::string method_name(VarianceMethod method) {
  return method == VarianceMethod::UStat ? "LKSD-U" : "LKSD-V";
}
constexpr const char* kExactMethod = "KSD-exact";

Matrix matrix_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    throw ConfigError(std::string(what) + ": expected a non-empty array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ConfigError(std::string(what) + ": ragged rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) out(i, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return out;
}

Vector vector_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw ConfigError(std::string(what) + ": expected a non-empty array");
  Vector out(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) out(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return out;
}

template <class M>
json matrix_to_json(const M& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
    out.push_back(std::move(row));
  }
  return out;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed, const char* what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + ": expected a JSON object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& item : j.items()) {
    if (!keys.contains(item.key())) {
      throw ConfigError(std::string(what) + ": unknown key '" + item.key() + "'");
    }
  }
}

struct Problem {
  AnyModel p;
  AnyModel q;
  Dataset data;
};

RowMatrix gdpm_training(const ExperimentConfig& cfg) {
  const GdpmModel reference(Vector::Zero(cfg.gdpm.data_dim), cfg.gdpm.phi_sq);
  if (cfg.gdpm.n_train == 0) return RowMatrix(0, cfg.gdpm.data_dim);
  return reference.marginal_sample(cfg.gdpm.n_train, derive_seed(cfg.seed, 0, kRoleTraining)).points;
}

Problem build_problem(const ExperimentConfig& cfg, std::uint64_t seed, int n) {
  const std::uint64_t model_seed = derive_seed(seed, 0, kRoleModel);
  const std::uint64_t data_seed = derive_seed(seed, static_cast<std::uint64_t>(n), kRoleData);
  switch (cfg.family) {
    case Family::Ppca: {
      const auto reference = PpcaModel::random_uniform(cfg.ppca.data_dim, cfg.ppca.latent_dim,
                                                       cfg.ppca.psi, model_seed);
      return {reference.perturb(cfg.delta_p), reference.perturb(cfg.delta_q),
              reference.sample(n, data_seed)};
    }
    case Family::Lda: {
      const auto reference = LdaModel::with_random_topics(cfg.lda.topics, cfg.lda.vocab_size,
                                                          cfg.lda.a0, model_seed);
      return {reference.perturb(cfg.delta_p), reference.perturb(cfg.delta_q),
              reference.sample(n, cfg.lda.words, data_seed)};
    }
    case Family::Gdpm: {
      const GdpmModel reference(Vector::Zero(cfg.gdpm.data_dim), cfg.gdpm.phi_sq);
      // One training set for the whole run.
      const RowMatrix training = gdpm_training(cfg);
      return {GdpmModel::shifted(cfg.gdpm.data_dim, cfg.delta_p, cfg.gdpm.phi_sq).conditioned_on(training),
              GdpmModel::shifted(cfg.gdpm.data_dim, cfg.delta_q, cfg.gdpm.phi_sq).conditioned_on(training),
              reference.marginal_sample(n, data_seed)};
    }
  }
  throw ConfigError("unknown model family");
}

SteinGram latent_gram(const AnyModel& model, const Dataset& data,
                      const std::vector<LatentBatch>& latents, const KernelSpec& kernel) {
  const ScoreMatrix scores = average_scores(score_function(model, data), data, latents);
  return stein_gram(scores, data, kernel);
}

}  // namespace

// ---------------------------------------------------------------------------------------
// Config

std::string to_string(Family family) {
  switch (family) {
    case Family::Ppca: return "ppca";
    case Family::Lda: return "lda";
    case Family::Gdpm: return "gdpm";
  }
  return "unknown";
}

Family family_from_string(const std::string& name) {
  if (name == "ppca") return Family::Ppca;
  if (name == "lda") return Family::Lda;
  if (name == "gdpm") return Family::Gdpm;
  throw ConfigError("unknown model family '" + name + "' (expected ppca, lda or gdpm)");
}

ExperimentConfig ExperimentConfig::defaults(Family family) {
  ExperimentConfig cfg;
  cfg.family = family;
  switch (family) {
    case Family::Ppca:
      cfg.delta_p = 1.0;
      cfg.delta_q = 1.1;
      cfg.m = 200;
      cfg.t = 100;
      cfg.include_exact = true;
      break;
    case Family::Lda:
      cfg.delta_p = 0.4;
      cfg.delta_q = 0.5;
      cfg.m = 200;
      cfg.t = 1000;
      break;
    case Family::Gdpm:
      cfg.delta_p = 0.5;
      cfg.delta_q = 1.0;
      cfg.n = {200};
      cfg.m = 200;
      cfg.t = 300;
      break;
  }
  return cfg;
}

void ExperimentConfig::use_paper_scale() {
  trials = 300;
  switch (family) {
    case Family::Ppca:
      m = 500;
      t = 200;
      break;
    case Family::Lda:
      m = 500;
      t = 5000;
      break;
    case Family::Gdpm:
      m = 500;
      t = 1000;
      break;
  }
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (n.empty()) throw ConfigError("at least one sample size is required");
  for (int size : n) {
    if (size < 4) throw ConfigError("every sample size must be >= 4");
  }
  if (alpha.empty()) throw ConfigError("at least one significance level is required");
  for (double a : alpha) {
    if (!(a > 0.0 && a <= 0.5)) throw ConfigError("every alpha must lie in (0, 0.5]");
  }
  if (m < 1) throw ConfigError("m must be >= 1");
  if (t < 0) throw ConfigError("t must be >= 0");
  if (variance_methods.empty()) throw ConfigError("at least one variance method is required");
  if (include_exact && family != Family::Ppca) {
    throw ConfigError("include_exact is only available for the ppca family");
  }
  if (shared_latents && delta_p != delta_q) {
    throw ConfigError("shared_latents requires delta_p == delta_q");
  }
  if (scenario == Scenario::Identical && delta_p != delta_q) {
    throw ConfigError("the identical scenario requires delta_p == delta_q");
  }
  switch (family) {
    case Family::Ppca:
      if (ppca.latent_dim < 1 || ppca.latent_dim >= ppca.data_dim) {
        throw ConfigError("ppca: need 1 <= latent_dim < data_dim");
      }
      if (!(ppca.psi > 0.0)) throw ConfigError("ppca: psi must be positive");
      break;
    case Family::Lda:
      if (lda.topics < 1 || lda.vocab_size < 2 || lda.words < 1) {
        throw ConfigError("lda: need topics >= 1, vocab_size >= 2, words >= 1");
      }
      if (!(lda.a0 > 0.0) || !(lda.a0 + delta_p > 0.0) || !(lda.a0 + delta_q > 0.0)) {
        throw ConfigError("lda: perturbed concentrations must stay positive");
      }
      break;
    case Family::Gdpm:
      if (gdpm.data_dim < 1 || gdpm.n_train < 0) {
        throw ConfigError("gdpm: need data_dim >= 1 and n_train >= 0");
      }
      if (!(gdpm.phi_sq > 0.0)) throw ConfigError("gdpm: phi_sq must be positive");
      break;
  }
}

ExperimentConfig config_from_json(const json& j) {
  try {
    reject_unknown_keys(j,
                        {"schema_version", "name", "family", "scenario", "reference", "delta_p",
                         "delta_q", "n", "trials", "alpha", "m", "t", "variance_methods",
                         "include_exact", "shared_latents", "seed"},
                        "experiment config");
    if (j.contains("schema_version") &&
        j.at("schema_version").get<int>() != ExperimentConfig::kSchemaVersion) {
      throw ConfigError("unsupported schema_version " + j.at("schema_version").dump());
    }
    ExperimentConfig cfg = ExperimentConfig::defaults(family_from_string(j.at("family").get<std::string>()));
    cfg.name = j.value("name", std::string());
    if (j.contains("scenario")) {
      const auto s = j.at("scenario").get<std::string>();
      if (s == "relative") {
        cfg.scenario = Scenario::Relative;
      } else if (s == "identical") {
        cfg.scenario = Scenario::Identical;
      } else {
        throw ConfigError("unknown scenario '" + s + "' (expected relative or identical)");
      }
    }
    if (j.contains("reference")) {
      const json& r = j.at("reference");
      switch (cfg.family) {
        case Family::Ppca:
          reject_unknown_keys(r, {"data_dim", "latent_dim", "psi", "exact_posterior"}, "ppca reference");
          cfg.ppca.data_dim = r.value("data_dim", cfg.ppca.data_dim);
          cfg.ppca.latent_dim = r.value("latent_dim", cfg.ppca.latent_dim);
          cfg.ppca.psi = r.value("psi", cfg.ppca.psi);
          cfg.ppca.exact_posterior = r.value("exact_posterior", cfg.ppca.exact_posterior);
          break;
        case Family::Lda:
          reject_unknown_keys(r, {"topics", "vocab_size", "words", "a0"}, "lda reference");
          cfg.lda.topics = r.value("topics", cfg.lda.topics);
          cfg.lda.vocab_size = r.value("vocab_size", cfg.lda.vocab_size);
          cfg.lda.words = r.value("words", cfg.lda.words);
          cfg.lda.a0 = r.value("a0", cfg.lda.a0);
          break;
        case Family::Gdpm:
          reject_unknown_keys(r, {"data_dim", "phi_sq", "n_train"}, "gdpm reference");
          cfg.gdpm.data_dim = r.value("data_dim", cfg.gdpm.data_dim);
          cfg.gdpm.phi_sq = r.value("phi_sq", cfg.gdpm.phi_sq);
          cfg.gdpm.n_train = r.value("n_train", cfg.gdpm.n_train);
          break;
      }
    }
    cfg.delta_p = j.value("delta_p", cfg.delta_p);
    cfg.delta_q = j.value("delta_q", cfg.delta_q);
    if (j.contains("n")) cfg.n = j.at("n").get<std::vector<int>>();
    cfg.trials = j.value("trials", cfg.trials);
    if (j.contains("alpha")) {
      cfg.alpha = j.at("alpha").is_array() ? j.at("alpha").get<std::vector<double>>()
                                           : std::vector<double>{j.at("alpha").get<double>()};
    }
    cfg.m = j.value("m", cfg.m);
    cfg.t = j.value("t", cfg.t);
    if (j.contains("variance_methods")) {
      cfg.variance_methods.clear();
      for (const auto& name : j.at("variance_methods").get<std::vector<std::string>>()) {
        cfg.variance_methods.push_back(variance_method_from_string(name));
      }
    }
    cfg.include_exact = j.value("include_exact", cfg.include_exact);
    cfg.shared_latents = j.value("shared_latents", cfg.shared_latents);
    cfg.seed = j.value("seed", cfg.seed);
    if (cfg.scenario == Scenario::Identical) {
      cfg.delta_q = cfg.delta_p;
      if (!j.contains("variance_methods")) {
        cfg.variance_methods = {VarianceMethod::UStat, VarianceMethod::VStat};
      }
    }
    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["schema_version"] = ExperimentConfig::kSchemaVersion;
  j["name"] = cfg.name;
  j["family"] = to_string(cfg.family);
  j["scenario"] = cfg.scenario == Scenario::Identical ? "identical" : "relative";
  switch (cfg.family) {
    case Family::Ppca:
      j["reference"] = {{"data_dim", cfg.ppca.data_dim},
                        {"latent_dim", cfg.ppca.latent_dim},
                        {"psi", cfg.ppca.psi},
                        {"exact_posterior", cfg.ppca.exact_posterior}};
      break;
    case Family::Lda:
      j["reference"] = {{"topics", cfg.lda.topics},
                        {"vocab_size", cfg.lda.vocab_size},
                        {"words", cfg.lda.words},
                        {"a0", cfg.lda.a0}};
      break;
    case Family::Gdpm:
      j["reference"] = {{"data_dim", cfg.gdpm.data_dim},
                        {"phi_sq", cfg.gdpm.phi_sq},
                        {"n_train", cfg.gdpm.n_train}};
      break;
  }
  j["delta_p"] = cfg.delta_p;
  j["delta_q"] = cfg.delta_q;
  j["n"] = cfg.n;
  j["trials"] = cfg.trials;
  j["alpha"] = cfg.alpha;
  j["m"] = cfg.m;
  j["t"] = cfg.t;
  json methods = json::array();
  for (auto method : cfg.variance_methods) methods.push_back(to_string(method));
  j["variance_methods"] = methods;
  j["include_exact"] = cfg.include_exact;
  j["shared_latents"] = cfg.shared_latents;
  j["seed"] = cfg.seed;
  return j;
}

// ---------------------------------------------------------------------------------------
// Tables

WilsonInterval wilson_interval(int successes, int trials, double z) {
  if (trials <= 0) return {0.0, 1.0};
  const double nt = trials;
  const double p = successes / nt;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * nt)) / (1.0 + z2 / nt);
  const double half = z * std::sqrt(p * (1.0 - p) / nt + z2 / (4.0 * nt * nt)) / (1.0 + z2 / nt);
  // Rounding can push an endpoint past p when p is 0 or 1.
  return {std::clamp(centre - half, 0.0, p), std::clamp(centre + half, p, 1.0)};
}

const RejectionRow& RejectionTable::find(int n, double alpha, const std::string& method) const {
  for (const auto& row : rows) {
    if (row.n == n && row.alpha == alpha && row.method == method) return row;
  }
  throw std::out_of_range("RejectionTable: no row for n=" + std::to_string(n) + " method=" + method);
}

std::string RejectionTable::to_csv() const {
  std::string out = "n,alpha,method,rate,ci_lo,ci_hi,trials\n";
  char buf[256];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof buf, "%d,%g,%s,%.6f,%.6f,%.6f,%d\n", row.n, row.alpha,
                  row.method.c_str(), row.rate, row.ci.lo, row.ci.hi, row.trials);
    out += buf;
  }
  return out;
}

json RejectionTable::to_json() const {
  json j;
  j["schema_version"] = 1;
  j["tasks"] = tasks;
  json rows_json = json::array();
  for (const auto& row : rows) {
    rows_json.push_back({{"n", row.n},
                         {"alpha", row.alpha},
                         {"method", row.method},
                         {"rejects", row.rejects},
                         {"degenerate", row.degenerate},
                         {"trials", row.trials},
                         {"rate", row.rate},
                         {"ci_lo", row.ci.lo},
                         {"ci_hi", row.ci.hi}});
  }
  j["rows"] = rows_json;
  json fails = json::array();
  for (const auto& f : failures) {
    fails.push_back({{"trial", f.trial}, {"n", f.n}, {"seed", f.seed}, {"message", f.message}});
  }
  j["failures"] = fails;
  return j;
}

// ---------------------------------------------------------------------------------------
// Trials

std::uint64_t trial_seed(const ExperimentConfig& cfg, int trial) {
  return derive_seed(cfg.seed, static_cast<std::uint64_t>(trial), kRoleTrial);
}

TrialOutcome run_trial(const ExperimentConfig& cfg, int trial, int n) {
  const std::uint64_t seed = trial_seed(cfg, trial);
  const Problem problem = build_problem(cfg, seed, n);
  const Dataset& data = problem.data;
  const KernelSpec kernel = default_kernel(data);
  const SamplerSettings sampler{cfg.m, cfg.t, cfg.ppca.exact_posterior};

  const auto key = static_cast<std::uint64_t>(n);
  const std::vector<LatentBatch> latents_p =
      draw_latents(problem.p, data, sampler, derive_seed(seed, key, kRoleLatentP));
  const std::vector<LatentBatch> latents_q =
      cfg.shared_latents ? latents_p
                         : draw_latents(problem.q, data, sampler, derive_seed(seed, key, kRoleLatentQ));
  const SteinGram diff = diff_gram(latent_gram(problem.p, data, latents_p, kernel),
                                   latent_gram(problem.q, data, latents_q, kernel));

  std::optional<SteinGram> exact_diff;
  if (cfg.include_exact) {
    const auto& p = std::get<PpcaModel>(problem.p);
    const auto& q = std::get<PpcaModel>(problem.q);
    exact_diff = diff_gram(stein_gram(marginal_scores(p.marginal_score_fn(), data), data, kernel),
                           stein_gram(marginal_scores(q.marginal_score_fn(), data), data, kernel));
  }

  TrialOutcome out;
  out.alphas = cfg.alpha;
  for (auto method : cfg.variance_methods) out.methods.push_back(method_name(method));
  if (exact_diff) out.methods.emplace_back(kExactMethod);
  for (double alpha : cfg.alpha) {
    for (auto method : cfg.variance_methods) {
      out.reports.push_back(relative_test_diff(diff, TestConfig{alpha, method, cfg.m, cfg.t}));
    }
    if (exact_diff) {
      out.reports.push_back(
          relative_test_diff(*exact_diff, TestConfig{alpha, VarianceMethod::VStat, cfg.m, cfg.t}));
    }
  }
  return out;
}

RejectionTable run_experiment(const ExperimentConfig& cfg, std::ostream* log) {
  cfg.validate();
  const std::size_t sizes = cfg.n.size();
  const std::size_t tasks = static_cast<std::size_t>(cfg.trials) * sizes;
  std::vector<std::optional<TrialOutcome>> outcomes(tasks);
  std::vector<std::optional<TrialFailure>> failures(tasks);

  parallel_for(tasks, [&](std::size_t task) {
    const int trial = static_cast<int>(task / sizes);
    const int n = cfg.n[task % sizes];
    try {
      outcomes[task] = run_trial(cfg, trial, n);
    } catch (const std::exception& e) {
      failures[task] = TrialFailure{trial, n, trial_seed(cfg, trial), e.what()};
    }
  });

  RejectionTable table;
  table.tasks = static_cast<int>(tasks);
  for (auto& f : failures) {
    if (!f) continue;
    if (log) *log << "trial " << f->trial << " (n=" << f->n << ", seed " << f->seed
                  << ") aborted: " << f->message << '\n';
    table.failures.push_back(std::move(*f));
  }
  if (table.failures.size() * 20 > tasks) {
    throw ExperimentFailed(std::to_string(table.failures.size()) + " of " + std::to_string(tasks) +
                           " trials aborted (limit 5%); first error: " +
                           table.failures.front().message);
  }

  std::vector<std::string> methods;
  for (auto method : cfg.variance_methods) methods.push_back(method_name(method));
  if (cfg.include_exact) methods.emplace_back(kExactMethod);

  for (std::size_t s = 0; s < sizes; ++s) {
    for (std::size_t a = 0; a < cfg.alpha.size(); ++a) {
      for (std::size_t k = 0; k < methods.size(); ++k) {
        RejectionRow row;
        row.n = cfg.n[s];
        row.alpha = cfg.alpha[a];
        row.method = methods[k];
        for (int trial = 0; trial < cfg.trials; ++trial) {
          const auto& outcome = outcomes[static_cast<std::size_t>(trial) * sizes + s];
          if (!outcome) continue;
          const TestReport& report = outcome->reports[a * methods.size() + k];
          ++row.trials;
          row.rejects += report.reject ? 1 : 0;
          row.degenerate += report.degenerate ? 1 : 0;
        }
        row.rate = row.trials > 0 ? static_cast<double>(row.rejects) / row.trials : 0.0;
        row.ci = wilson_interval(row.rejects, row.trials);
        table.rows.push_back(row);
      }
    }
  }
  return table;
}

RejectionTable run_identical_models(ExperimentConfig cfg, std::ostream* log) {
  cfg.scenario = Scenario::Identical;
  cfg.delta_q = cfg.delta_p;
  cfg.variance_methods = {VarianceMethod::UStat, VarianceMethod::VStat};
  return run_experiment(cfg, log);
}

void write_artifacts(const RejectionTable& table, const ExperimentConfig& cfg,
                     const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  {
    std::ofstream csv(base / "rejection_table.csv", std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + (base / "rejection_table.csv").string());
    csv << table.to_csv();
  }
  json j = table.to_json();
  j["config"] = to_json(cfg);
  std::ofstream out(base / "results.json", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + (base / "results.json").string());
  out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------------------
// Models as data

AnyModel model_from_json(const json& j) {
  try {
    const Family family = family_from_string(j.at("family").get<std::string>());
    switch (family) {
      case Family::Ppca:
        reject_unknown_keys(j, {"family", "weights", "psi"}, "ppca model");
        return PpcaModel(matrix_from_json(j.at("weights"), "weights"), j.at("psi").get<double>());
      case Family::Lda:
        reject_unknown_keys(j, {"family", "concentration", "topics"}, "lda model");
        return LdaModel(vector_from_json(j.at("concentration"), "concentration"),
                        matrix_from_json(j.at("topics"), "topics"));
      case Family::Gdpm: {
        reject_unknown_keys(j, {"family", "mu", "phi_sq", "training"}, "gdpm model");
        Vector mu = vector_from_json(j.at("mu"), "mu");
        std::optional<RowMatrix> training;
        if (j.contains("training")) {
          const json& t = j.at("training");
          training = (t.is_array() && t.empty()) ? RowMatrix(0, mu.size())
                                                 : RowMatrix(matrix_from_json(t, "training"));
        }
        return GdpmModel(std::move(mu), j.at("phi_sq").get<double>(), std::move(training));
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("model config: ") + e.what());
  }
  throw ConfigError("model config: unknown family");
}

json model_to_json(const AnyModel& model) {
  return std::visit(
      [](const auto& m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PpcaModel>) {
          return {{"family", "ppca"}, {"weights", matrix_to_json(m.weights())}, {"psi", m.psi()}};
        } else if constexpr (std::is_same_v<T, LdaModel>) {
          return {{"family", "lda"},
                  {"concentration", vector_to_json(m.concentration())},
                  {"topics", matrix_to_json(m.topics())}};
        } else {
          json j = {{"family", "gdpm"}, {"mu", vector_to_json(m.mu())}, {"phi_sq", m.phi_sq()}};
          if (m.training_data()) j["training"] = matrix_to_json(*m.training_data());
          return j;
        }
      },
      model);
}

std::vector<LatentBatch> draw_latents(const AnyModel& model, const Dataset& data,
                                      const SamplerSettings& sampler, std::uint64_t seed) {
  score_function(model, data);  // validates the data against the model
  std::vector<LatentBatch> batches(static_cast<std::size_t>(data.size()));
  parallel_for(batches.size(), [&](std::size_t i) {
    const Point x = data.row(static_cast<Eigen::Index>(i));
    const std::uint64_t s = derive_seed(seed, i, 0);
    batches[i] = std::visit(
        [&](const auto& m) -> LatentBatch {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, PpcaModel>) {
            return sampler.ppca_exact ? m.posterior_exact(x, sampler.m, s)
                                      : m.posterior_mcmc(x, sampler.m, sampler.t, MalaParams{}, s);
          } else if constexpr (std::is_same_v<T, LdaModel>) {
            return m.collapsed_gibbs(x, sampler.m, sampler.t, s);
          } else {
            return m.posterior_sampler(x, sampler.m, sampler.t, s);
          }
        },
        model);
  });
  return batches;
}

CondScoreFn score_function(const AnyModel& model, const Dataset& data) {
  return std::visit(
      [&](const auto& m) -> CondScoreFn {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LdaModel>) {
          if (!data.discrete() || data.vocab_size != m.vocab_size()) {
            throw ConfigError("lda model needs integer data over its vocabulary of " +
                              std::to_string(m.vocab_size()) + " words");
          }
          return m.cond_score_fn(static_cast<int>(data.dim()));
        } else {
          if (data.discrete() || data.dim() != m.data_dim()) {
            throw ConfigError("model expects continuous data of dimension " +
                              std::to_string(m.data_dim()));
          }
          return m.cond_score_fn();
        }
      },
      model);
}

KernelSpec default_kernel(const Dataset& data) {
  if (data.discrete()) return KernelSpec::bow_gaussian(data.vocab_size);
  return KernelSpec::gaussian_sq(median_heuristic(data));
}

Dataset read_dataset_csv(const std::string& path, int vocab_size) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open data file " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ConfigError(path + ": line " + std::to_string(rows.size() + 1) +
                          ": not a number: '" + cell + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ConfigError(path + ": line " + std::to_string(rows.size() + 1) + " has " +
                        std::to_string(row.size()) + " columns, expected " +
                        std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError(path + ": no observations");
  RowMatrix pts(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < rows[i].size(); ++c) {
      pts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
    }
  }
  try {
    return Dataset(std::move(pts), vocab_size);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  char buf[32];
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    for (Eigen::Index c = 0; c < data.dim(); ++c) {
      if (c) out << ',';
      std::snprintf(buf, sizeof buf, "%.17g", data.points(i, c));
      out << buf;
    }
    out << '\n';
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace steincmp
