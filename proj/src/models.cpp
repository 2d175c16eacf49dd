#include "steincmp/models.hpp"

#include "steincmp/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace steincmp {

namespace {

Eigen::Map<const Vector> as_vector(Point p) {
  return {p.data(), static_cast<Eigen::Index>(p.size())};
}

void require_dim(Point p, Eigen::Index dim, const char* what) {
  if (static_cast<Eigen::Index>(p.size()) != dim) {
    throw std::invalid_argument(std::string(what) + ": expected dimension " +
                                std::to_string(dim) + ", got " + std::to_string(p.size()));
  }
}

}  // namespace

// ---------------------------------------------------------------------------------------
// PPCA

PpcaModel::PpcaModel(Matrix weights, double psi) : weights_(std::move(weights)), psi_(psi) {
  if (!(psi_ > 0.0) || !std::isfinite(psi_)) {
    throw std::invalid_argument("PpcaModel: psi must be positive");
  }
  if (weights_.cols() < 1 || weights_.cols() >= weights_.rows()) {
    throw std::invalid_argument("PpcaModel: need 1 <= latent_dim < data_dim");
  }
  if (!weights_.allFinite()) throw std::invalid_argument("PpcaModel: non-finite weights");

  const double psi_sq = psi_ * psi_;
  marginal_llt_.compute(marginal_cov());
  if (marginal_llt_.info() != Eigen::Success) {
    throw std::runtime_error("PpcaModel: marginal covariance is not positive definite");
  }
  posterior_precision_ = Matrix::Identity(latent_dim(), latent_dim()) +
                         weights_.transpose() * weights_ / psi_sq;
  posterior_cov_ = posterior_precision_.llt().solve(Matrix::Identity(latent_dim(), latent_dim()));
  posterior_cov_ = 0.5 * (posterior_cov_ + posterior_cov_.transpose());
  posterior_cov_chol_ = posterior_cov_.llt().matrixL();
}

PpcaModel PpcaModel::random_uniform(int data_dim, int latent_dim, double psi,
                                    std::uint64_t seed) {
  Rng rng(seed);
  Matrix a(data_dim, latent_dim);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = uniform01(rng);
  }
  return {std::move(a), psi};
}

PpcaModel PpcaModel::perturb(double delta) const {
  Matrix a = weights_;
  a(0, 0) += delta;
  return {std::move(a), psi_};
}

Matrix PpcaModel::marginal_cov() const {
  return weights_ * weights_.transpose() +
         psi_ * psi_ * Matrix::Identity(data_dim(), data_dim());
}

Vector PpcaModel::posterior_mean(Point x) const {
  require_dim(x, data_dim(), "PpcaModel::posterior_mean");
  return posterior_cov_ * (weights_.transpose() * as_vector(x)) / (psi_ * psi_);
}

Dataset PpcaModel::sample(Eigen::Index n, std::uint64_t seed) const {
  if (n < 1) throw std::invalid_argument("PpcaModel::sample: n must be >= 1");
  Rng rng(seed);
  RowMatrix pts(n, data_dim());
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector z = standard_normal(latent_dim(), rng);
    const Vector eps = standard_normal(data_dim(), rng);
    pts.row(i) = (weights_ * z + psi_ * eps).transpose();
  }
  return Dataset(std::move(pts));
}

void PpcaModel::cond_score(Point x, Point z, std::span<double> out) const {
  const double inv = 1.0 / (psi_ * psi_);
  const Vector az = weights_ * as_vector(z);
  for (Eigen::Index d = 0; d < data_dim(); ++d) {
    out[static_cast<std::size_t>(d)] = -(x[static_cast<std::size_t>(d)] - az(d)) * inv;
  }
}

Vector PpcaModel::cond_score(Point x, Point z) const {
  require_dim(x, data_dim(), "PpcaModel::cond_score");
  require_dim(z, latent_dim(), "PpcaModel::cond_score");
  Vector out(data_dim());
  cond_score(x, z, std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
  return out;
}

Vector PpcaModel::marginal_score(Point x) const {
  require_dim(x, data_dim(), "PpcaModel::marginal_score");
  return -marginal_llt_.solve(as_vector(x));
}

LatentBatch PpcaModel::posterior_exact(Point x, Eigen::Index m, std::uint64_t seed) const {
  if (m < 1) throw std::invalid_argument("PpcaModel::posterior_exact: m must be >= 1");
  Rng rng(seed);
  const Vector mean = posterior_mean(x);
  LatentBatch batch;
  batch.draws.resize(m, latent_dim());
  for (Eigen::Index j = 0; j < m; ++j) {
    batch.draws.row(j) = (mean + posterior_cov_chol_ * standard_normal(latent_dim(), rng)).transpose();
  }
  batch.sampler = "ppca-exact";
  batch.seed = seed;
  return batch;
}

LatentBatch PpcaModel::posterior_mcmc(Point x, Eigen::Index m, int burn_in,
                                      const MalaParams& params, std::uint64_t seed) const {
  require_dim(x, data_dim(), "PpcaModel::posterior_mcmc");
  const Vector xv = as_vector(x);
  const double inv = 1.0 / (psi_ * psi_);
  const LogDensityGrad target = [&](const Vector& z, Vector& grad) {
    const Vector resid = xv - weights_ * z;
    grad = weights_.transpose() * resid * inv - z;
    return -0.5 * inv * resid.squaredNorm() - 0.5 * z.squaredNorm();
  };

  Rng rng(seed);
  Vector init = standard_normal(latent_dim(), rng);  // prior draw
  const MalaRun run = run_mala(target, std::move(init), m, burn_in, params,
                               params.use_metric ? &posterior_precision_ : nullptr, rng);
  LatentBatch batch;
  batch.draws = run.draws;
  batch.burn_in = burn_in;
  batch.sampler = "ppca-mala";
  batch.seed = seed;
  batch.acceptance_rate = run.acceptance_rate;
  return batch;
}

CondScoreFn PpcaModel::cond_score_fn() const {
  auto model = std::make_shared<const PpcaModel>(*this);
  return {[model](Point x, Point z, std::span<double> out) { model->cond_score(x, z, out); },
          data_dim(), 0};
}

MarginalScoreFn PpcaModel::marginal_score_fn() const {
  auto model = std::make_shared<const PpcaModel>(*this);
  return {[model](Point x, std::span<double> out) {
            const Vector s = model->marginal_score(x);
            std::copy(s.data(), s.data() + s.size(), out.begin());
          },
          data_dim()};
}

// ---------------------------------------------------------------------------------------
// LDA

LdaModel::LdaModel(Vector concentration, Matrix topics)
    : concentration_(std::move(concentration)), topics_(std::move(topics)) {
  if (concentration_.size() != topics_.rows() || topics_.rows() < 1) {
    throw std::invalid_argument("LdaModel: need one concentration entry per topic row");
  }
  if (topics_.cols() < 2) throw std::invalid_argument("LdaModel: vocabulary size must be > 1");
  for (Eigen::Index k = 0; k < concentration_.size(); ++k) {
    if (!(concentration_(k) > 0.0) || !std::isfinite(concentration_(k))) {
      throw std::invalid_argument("LdaModel: concentrations must be positive");
    }
  }
  for (Eigen::Index k = 0; k < topics_.rows(); ++k) {
    if (!(topics_.row(k).minCoeff() > 0.0)) {
      throw std::invalid_argument("LdaModel: topic-word probabilities must be strictly positive");
    }
    if (std::abs(topics_.row(k).sum() - 1.0) > 1e-12) {
      throw std::invalid_argument("LdaModel: topic row " + std::to_string(k) +
                                  " does not sum to one");
    }
  }
  const Eigen::Index vocab = topics_.cols();
  score_table_.resize(topics_.rows(), vocab);
  for (Eigen::Index k = 0; k < topics_.rows(); ++k) {
    for (Eigen::Index v = 0; v < vocab; ++v) {
      score_table_(k, v) = topics_(k, (v + 1) % vocab) / topics_(k, v) - 1.0;
    }
  }
}

LdaModel LdaModel::with_random_topics(int topics, int vocab_size, double a0, std::uint64_t seed) {
  if (topics < 1 || vocab_size < 2) {
    throw std::invalid_argument("LdaModel::with_random_topics: need K >= 1 and L >= 2");
  }
  Rng rng(seed);
  Matrix b(topics, vocab_size);
  const Vector ones = Vector::Ones(vocab_size);
  for (int k = 0; k < topics; ++k) {
    Vector row = sample_dirichlet(ones, rng);
    // Strict positivity is a model invariant; Dir(1) draws are positive almost surely.
    row = row.cwiseMax(1e-300);
    row /= row.sum();
    b.row(k) = row.transpose();
  }
  return {Vector::Constant(topics, a0), std::move(b)};
}

LdaModel LdaModel::perturb(double delta) const {
  return {(concentration_.array() + delta).matrix(), topics_};
}

Dataset LdaModel::sample(Eigen::Index n, int words, std::uint64_t seed) const {
  if (n < 1 || words < 1) throw std::invalid_argument("LdaModel::sample: n and D must be >= 1");
  Rng rng(seed);
  RowMatrix docs(n, words);
  std::vector<double> word_probs(static_cast<std::size_t>(vocab_size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector theta = sample_dirichlet(concentration_, rng);
    for (int j = 0; j < words; ++j) {
      const int k = sample_categorical(std::span<const double>(theta.data(), theta.size()), rng);
      for (int v = 0; v < vocab_size(); ++v) word_probs[static_cast<std::size_t>(v)] = topics_(k, v);
      docs(i, j) = sample_categorical(word_probs, rng);
    }
  }
  return Dataset(std::move(docs), vocab_size());
}

void LdaModel::cond_score(Point x, Point z, std::span<double> out) const {
  for (std::size_t j = 0; j < x.size(); ++j) {
    out[j] = score_table_(static_cast<Eigen::Index>(z[j]), static_cast<Eigen::Index>(x[j]));
  }
}

Vector LdaModel::cond_score(Point x, Point z) const {
  if (x.size() != z.size()) {
    throw std::invalid_argument("LdaModel::cond_score: document and assignment lengths differ");
  }
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] < 0 || x[j] >= vocab_size() || z[j] < 0 || z[j] >= num_topics()) {
      throw std::invalid_argument("LdaModel::cond_score: word or topic out of range");
    }
  }
  Vector out(static_cast<Eigen::Index>(x.size()));
  cond_score(x, z, std::span<double>(out.data(), x.size()));
  return out;
}

LatentBatch LdaModel::collapsed_gibbs(Point x, Eigen::Index m, int burn_in,
                                      std::uint64_t seed) const {
  if (m < 1 || burn_in < 0) {
    throw std::invalid_argument("LdaModel::collapsed_gibbs: need m >= 1 and burn-in >= 0");
  }
  const int words = static_cast<int>(x.size());
  const int topics = num_topics();
  LatentBatch batch;
  batch.draws = RowMatrix::Zero(m, words);
  batch.burn_in = burn_in;
  batch.sampler = "lda-collapsed-gibbs";
  batch.seed = seed;
  if (topics == 1 || words == 0) return batch;

  Rng rng(seed);
  std::vector<int> word(static_cast<std::size_t>(words));
  for (int j = 0; j < words; ++j) {
    const double v = x[static_cast<std::size_t>(j)];
    if (v < 0 || v >= vocab_size() || v != std::floor(v)) {
      throw std::invalid_argument("LdaModel::collapsed_gibbs: word out of range");
    }
    word[static_cast<std::size_t>(j)] = static_cast<int>(v);
  }

  std::vector<int> assign(static_cast<std::size_t>(words));
  std::vector<double> counts(static_cast<std::size_t>(topics), 0.0);
  std::vector<double> weights(static_cast<std::size_t>(topics));
  // Initial state: independent draws from p(z_j | x_j) under the prior mean of theta.
  for (int j = 0; j < words; ++j) {
    for (int k = 0; k < topics; ++k) {
      weights[static_cast<std::size_t>(k)] = concentration_(k) * topics_(k, word[static_cast<std::size_t>(j)]);
    }
    const int k = sample_categorical(weights, rng);
    assign[static_cast<std::size_t>(j)] = k;
    counts[static_cast<std::size_t>(k)] += 1.0;
  }

  std::uniform_int_distribution<int> pick(0, words - 1);
  auto sweep = [&] {
    for (int s = 0; s < words; ++s) {
      const auto j = static_cast<std::size_t>(pick(rng));
      counts[static_cast<std::size_t>(assign[j])] -= 1.0;
      for (int k = 0; k < topics; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        weights[uk] = (concentration_(k) + counts[uk]) * topics_(k, word[j]);
      }
      const int k = sample_categorical(weights, rng);
      assign[j] = k;
      counts[static_cast<std::size_t>(k)] += 1.0;
    }
  };

  for (int s = 0; s < burn_in; ++s) sweep();
  for (Eigen::Index r = 0; r < m; ++r) {
    sweep();
    for (int j = 0; j < words; ++j) batch.draws(r, j) = assign[static_cast<std::size_t>(j)];
  }
  return batch;
}

CondScoreFn LdaModel::cond_score_fn(int words) const {
  auto model = std::make_shared<const LdaModel>(*this);
  return {[model](Point x, Point z, std::span<double> out) { model->cond_score(x, z, out); },
          words, vocab_size()};
}

// ---------------------------------------------------------------------------------------
// Gaussian DP mixture

namespace {

// Joint state of the training latents and the test latent: a cluster label per point plus
// one location per cluster. Rows 0..n_tr-1 are training points; the last row is the test
// observation.
class PredictiveChain {
 public:
  PredictiveChain(const RowMatrix& training, Point x, const Vector& mu, double phi_sq, Rng& rng)
      : data_(training.rows() + 1, mu.size()), mu_(mu), phi_sq_(phi_sq), rng_(rng) {
    if (training.rows() > 0) data_.topRows(training.rows()) = training;
    data_.row(training.rows()) = Eigen::Map<const Vector>(x.data(), mu.size()).transpose();
    for (Eigen::Index i = 0; i < data_.rows(); ++i) {
      label_.push_back(static_cast<int>(i));
      locations_.push_back(draw_single_posterior(i));
      sizes_.push_back(1);
    }
  }

  Eigen::Index num_training() const { return data_.rows() - 1; }
  const Vector& test_latent() const { return location_of(num_training()); }

  /// Random-scan Gibbs over the training labels (n_tr uniformly chosen updates), one
  /// independence Metropolis update of the test latent, then every occupied cluster
  /// location redrawn from its conjugate posterior. Returns whether the Metropolis
  /// proposal was accepted.
  bool transition() {
    const Eigen::Index n_tr = num_training();
    if (n_tr > 0) {
      std::uniform_int_distribution<Eigen::Index> pick(0, n_tr - 1);
      for (Eigen::Index s = 0; s < n_tr; ++s) update_training_label(pick(rng_));
    }
    const bool accepted = update_test_label();
    for (std::size_t c = 0; c < locations_.size(); ++c) {
      if (sizes_[c] > 0) locations_[c] = draw_cluster_posterior(static_cast<int>(c));
    }
    return accepted;
  }

 private:
  const Vector& location_of(Eigen::Index i) const {
    return locations_[static_cast<std::size_t>(label_[static_cast<std::size_t>(i)])];
  }

  double sq_dist(Eigen::Index i, const Vector& z) const {
    return (data_.row(i).transpose() - z).squaredNorm();
  }

  Vector draw_single_posterior(Eigen::Index i) {
    // z | x under N(mu, I) prior and N(z, phi^2 I) likelihood.
    const double var = phi_sq_ / (1.0 + phi_sq_);
    const Vector mean = (data_.row(i).transpose() + phi_sq_ * mu_) / (1.0 + phi_sq_);
    return mean + std::sqrt(var) * standard_normal(mu_.size(), rng_);
  }

  Vector draw_cluster_posterior(int c) {
    Vector sum = Vector::Zero(mu_.size());
    int count = 0;
    for (std::size_t i = 0; i < label_.size(); ++i) {
      if (label_[i] == c) {
        sum += data_.row(static_cast<Eigen::Index>(i)).transpose();
        ++count;
      }
    }
    const double precision = 1.0 + count / phi_sq_;
    const Vector mean = (mu_ + sum / phi_sq_) / precision;
    return mean + std::sqrt(1.0 / precision) * standard_normal(mu_.size(), rng_);
  }

  int open_cluster(Vector location) {
    for (std::size_t c = 0; c < locations_.size(); ++c) {
      if (sizes_[c] == 0) {
        locations_[c] = std::move(location);
        return static_cast<int>(c);
      }
    }
    locations_.push_back(std::move(location));
    sizes_.push_back(0);
    return static_cast<int>(locations_.size() - 1);
  }

  void assign(Eigen::Index i, int c) {
    label_[static_cast<std::size_t>(i)] = c;
    ++sizes_[static_cast<std::size_t>(c)];
  }

  void update_training_label(Eigen::Index i) {
    --sizes_[static_cast<std::size_t>(label_[static_cast<std::size_t>(i)])];
    // log weights relative to the (2 pi phi^2)^(-D/2) normaliser of psi
    std::vector<double> logw(locations_.size() + 1, -std::numeric_limits<double>::infinity());
    for (std::size_t c = 0; c < locations_.size(); ++c) {
      if (sizes_[c] > 0) {
        logw[c] = std::log(static_cast<double>(sizes_[c])) - sq_dist(i, locations_[c]) / (2.0 * phi_sq_);
      }
    }
    // New cluster: DP mass 1 times N(x; mu, (1 + phi^2) I).
    const double s = 1.0 + phi_sq_;
    logw.back() = 0.5 * static_cast<double>(mu_.size()) * std::log(phi_sq_ / s) -
                  (data_.row(i).transpose() - mu_).squaredNorm() / (2.0 * s);

    const double top = *std::max_element(logw.begin(), logw.end());
    std::vector<double> w(logw.size());
    for (std::size_t c = 0; c < w.size(); ++c) w[c] = std::exp(logw[c] - top);
    const auto choice = static_cast<std::size_t>(sample_categorical(w, rng_));
    assign(i, choice == locations_.size() ? open_cluster(draw_single_posterior(i))
                                          : static_cast<int>(choice));
  }

  bool update_test_label() {
    // Proposal from the predictive prior (a + sum_i delta_{z~_i}) / (n_tr + 1).
    const Eigen::Index test = num_training();
    const Eigen::Index n_tr = num_training();
    const double base_prob = 1.0 / static_cast<double>(n_tr + 1);
    Vector proposal;
    int target_cluster = -1;
    if (n_tr == 0 || uniform01(rng_) < base_prob) {
      proposal = mu_ + standard_normal(mu_.size(), rng_);
    } else {
      std::uniform_int_distribution<Eigen::Index> pick(0, n_tr - 1);
      target_cluster = label_[static_cast<std::size_t>(pick(rng_))];
      proposal = locations_[static_cast<std::size_t>(target_cluster)];
    }
    const double log_ratio = -(sq_dist(test, proposal) - sq_dist(test, test_latent())) / (2.0 * phi_sq_);
    if (!(log_ratio >= 0.0 || uniform01(rng_) < std::exp(log_ratio))) return false;

    --sizes_[static_cast<std::size_t>(label_[static_cast<std::size_t>(test)])];
    assign(test, target_cluster >= 0 ? target_cluster : open_cluster(std::move(proposal)));
    return true;
  }

  RowMatrix data_;
  Vector mu_;
  double phi_sq_;
  Rng& rng_;
  std::vector<int> label_;
  std::vector<Vector> locations_;
  std::vector<int> sizes_;
};

}  // namespace

GdpmModel::GdpmModel(Vector mu, double phi_sq, std::optional<RowMatrix> training)
    : mu_(std::move(mu)), phi_sq_(phi_sq), training_(std::move(training)) {
  if (!(phi_sq_ > 0.0) || !std::isfinite(phi_sq_)) {
    throw std::invalid_argument("GdpmModel: phi^2 must be positive");
  }
  if (mu_.size() < 1) throw std::invalid_argument("GdpmModel: empty prior mean");
  if (training_ && training_->rows() > 0 && training_->cols() != mu_.size()) {
    throw std::invalid_argument("GdpmModel: training data dimension does not match the model");
  }
}

GdpmModel GdpmModel::conditioned_on(RowMatrix training) const {
  return {mu_, phi_sq_, std::move(training)};
}

GdpmModel GdpmModel::shifted(int dim, double delta, double phi_sq) {
  if (dim < 1) throw std::invalid_argument("GdpmModel::shifted: dimension must be >= 1");
  return {Vector::Constant(dim, delta / std::sqrt(static_cast<double>(dim))), phi_sq};
}

Dataset GdpmModel::marginal_sample(Eigen::Index n, std::uint64_t seed) const {
  if (training_ && training_->rows() > 0) {
    throw std::invalid_argument(
        "GdpmModel::marginal_sample: only defined for the unconditioned model");
  }
  if (n < 1) throw std::invalid_argument("GdpmModel::marginal_sample: n must be >= 1");
  Rng rng(seed);
  const double sd = std::sqrt(phi_sq_ + 1.0);
  RowMatrix pts(n, data_dim());
  for (Eigen::Index i = 0; i < n; ++i) {
    pts.row(i) = (mu_ + sd * standard_normal(data_dim(), rng)).transpose();
  }
  return Dataset(std::move(pts));
}

void GdpmModel::cond_score(Point x, Point z, std::span<double> out) const {
  for (std::size_t d = 0; d < x.size(); ++d) out[d] = -(x[d] - z[d]) / phi_sq_;
}

Vector GdpmModel::cond_score(Point x, Point z) const {
  require_dim(x, data_dim(), "GdpmModel::cond_score");
  require_dim(z, data_dim(), "GdpmModel::cond_score");
  Vector out(data_dim());
  cond_score(x, z, std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
  return out;
}

PredictiveWeights GdpmModel::predictive_weights(Point x, const RowMatrix& training_latents) const {
  require_dim(x, data_dim(), "GdpmModel::predictive_weights");
  const auto dim = static_cast<double>(data_dim());
  const Vector xv = as_vector(x);
  constexpr double log_2pi = 1.8378770664093453;
  // log C_a with C_a = N(x; mu, (1 + phi^2) I)
  const double s = 1.0 + phi_sq_;
  const double log_ca = -0.5 * dim * (log_2pi + std::log(s)) - (xv - mu_).squaredNorm() / (2.0 * s);
  // log(n C_b) with n C_b = sum_i psi(x | z~_i)
  const Eigen::Index n = training_latents.rows();
  if (n == 0) return {1.0, 0.0};
  std::vector<double> terms(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    terms[static_cast<std::size_t>(i)] =
        -0.5 * dim * (log_2pi + std::log(phi_sq_)) -
        (xv - training_latents.row(i).transpose()).squaredNorm() / (2.0 * phi_sq_);
  }
  const double top = std::max(log_ca, *std::max_element(terms.begin(), terms.end()));
  double sum_b = 0.0;
  for (double t : terms) sum_b += std::exp(t - top);
  const double a = std::exp(log_ca - top);
  return {a / (a + sum_b), sum_b / (a + sum_b)};
}

LatentBatch GdpmModel::posterior_sampler(Point x, Eigen::Index m, int burn_in,
                                         std::uint64_t seed) const {
  if (!training_) {
    throw std::invalid_argument("GdpmModel::posterior_sampler: model has no training data");
  }
  if (m < 1 || burn_in < 0) {
    throw std::invalid_argument("GdpmModel::posterior_sampler: need m >= 1 and burn-in >= 0");
  }
  require_dim(x, data_dim(), "GdpmModel::posterior_sampler");

  Rng rng(seed);
  const RowMatrix empty(0, data_dim());
  PredictiveChain chain(training_->rows() > 0 ? *training_ : empty, x, mu_, phi_sq_, rng);
  for (int s = 0; s < burn_in; ++s) chain.transition();

  LatentBatch batch;
  batch.draws.resize(m, data_dim());
  Eigen::Index accepted = 0;
  for (Eigen::Index j = 0; j < m; ++j) {
    if (chain.transition()) ++accepted;
    batch.draws.row(j) = chain.test_latent().transpose();
  }
  batch.burn_in = burn_in;
  batch.sampler = "gdpm-gibbs-metropolis";
  batch.seed = seed;
  batch.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(m);
  return batch;
}

CondScoreFn GdpmModel::cond_score_fn() const {
  const double phi_sq = phi_sq_;
  return {[phi_sq](Point x, Point z, std::span<double> out) {
            for (std::size_t d = 0; d < x.size(); ++d) out[d] = -(x[d] - z[d]) / phi_sq;
          },
          data_dim(), 0};
}

}  // namespace steincmp
