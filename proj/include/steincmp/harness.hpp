#pragma once

// Experiment engine: problem construction by perturbation, trial loops over a worker
// pool, rejection-rate tables with Wilson intervals, and model/config (de)serialisation.

#include "steincmp/models.hpp"
#include "steincmp/reltest.hpp"

#include <iosfwd>
#include <variant>

namespace steincmp {

enum class Family { Ppca, Lda, Gdpm };
std::string to_string(Family family);
Family family_from_string(const std::string& name);

enum class Scenario { Relative, Identical };

struct PpcaSettings {
  int data_dim = 50;
  int latent_dim = 10;
  double psi = 1.0;
  bool exact_posterior = false;  // draw latents exactly instead of by MALA
};

struct LdaSettings {
  int topics = 3;
  int vocab_size = 100;
  int words = 50;
  double a0 = 0.1;
};

struct GdpmSettings {
  int data_dim = 10;
  double phi_sq = 2.0;
  int n_train = 5;
};

struct ExperimentConfig {
  static constexpr int kSchemaVersion = 1;

  std::string name;
  Family family = Family::Ppca;
  Scenario scenario = Scenario::Relative;
  PpcaSettings ppca;
  LdaSettings lda;
  GdpmSettings gdpm;
  double delta_p = 1.0;
  double delta_q = 1.1;
  std::vector<int> n{100, 200, 300};
  int trials = 100;
  std::vector<double> alpha{0.05};
  int m = 200;
  int t = 100;
  std::vector<VarianceMethod> variance_methods{VarianceMethod::VStat};
  bool include_exact = false;   // KSD with closed-form marginal scores (PPCA only)
  bool shared_latents = false;  // P and Q reuse one set of latent draws (identical models only)
  std::uint64_t seed = 1;

  /// Desk-scale defaults for a family.
  static ExperimentConfig defaults(Family family);
  /// trials = 300 and the family's full sampler settings.
  void use_paper_scale();
  /// Throws ConfigError.
  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);

struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
};
inline constexpr double kWilsonZ95 = 1.959963984540054;
WilsonInterval wilson_interval(int successes, int trials, double z = kWilsonZ95);

struct RejectionRow {
  int n = 0;
  double alpha = 0.0;
  std::string method;  // LKSD-U, LKSD-V or KSD-exact
  int rejects = 0;
  int degenerate = 0;
  int trials = 0;
  double rate = 0.0;
  WilsonInterval ci;
};

struct TrialFailure {
  int trial = 0;
  int n = 0;
  std::uint64_t seed = 0;
  std::string message;
};

struct RejectionTable {
  std::vector<RejectionRow> rows;
  std::vector<TrialFailure> failures;
  int tasks = 0;

  /// Throws std::out_of_range when absent.
  const RejectionRow& find(int n, double alpha, const std::string& method) const;
  /// Header n,alpha,method,rate,ci_lo,ci_hi,trials.
  std::string to_csv() const;
  nlohmann::json to_json() const;
};

/// Raised when more than 5% of the (trial, n) tasks abort.
class ExperimentFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-task result: one TestReport per (alpha, method) in table order.
struct TrialOutcome {
  std::vector<std::string> methods;
  std::vector<double> alphas;
  std::vector<TestReport> reports;  // alphas.size() * methods.size(), alpha-major
};

/// Seed of trial `trial` under the config's master seed; a trial re-run in isolation with
/// this seed reproduces its part of the table.
std::uint64_t trial_seed(const ExperimentConfig& cfg, int trial);
TrialOutcome run_trial(const ExperimentConfig& cfg, int trial, int n);

RejectionTable run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr);
/// run_experiment with delta_q forced to delta_p and both variance methods on the same grams.
RejectionTable run_identical_models(ExperimentConfig cfg, std::ostream* log = nullptr);

/// Writes rejection_table.csv and results.json into `dir` (created if missing).
void write_artifacts(const RejectionTable& table, const ExperimentConfig& cfg,
                     const std::string& dir);

// ---------------------------------------------------------------------------------------
// Models as data

using AnyModel = std::variant<PpcaModel, LdaModel, GdpmModel>;

/// {"family": "ppca", "weights": [[...]], "psi": 1}
/// {"family": "lda", "concentration": [...], "topics": [[...]]}
/// {"family": "gdpm", "mu": [...], "phi_sq": 2, "training": [[...]]}
AnyModel model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const AnyModel& model);

struct SamplerSettings {
  int m = 200;
  int t = 100;
  bool ppca_exact = false;
};

/// One batch of posterior draws per observation; observation i uses derive_seed(seed, i, 0).
std::vector<LatentBatch> draw_latents(const AnyModel& model, const Dataset& data,
                                      const SamplerSettings& sampler, std::uint64_t seed);
CondScoreFn score_function(const AnyModel& model, const Dataset& data);
/// BoW Gaussian for discrete data, Gaussian with the median-heuristic bandwidth otherwise.
KernelSpec default_kernel(const Dataset& data);

/// Headerless CSV, one observation per row.
Dataset read_dataset_csv(const std::string& path, int vocab_size = 0);
void write_dataset_csv(const Dataset& data, const std::string& path);

nlohmann::json read_json_file(const std::string& path);

}  // namespace steincmp
