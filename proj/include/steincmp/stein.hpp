#pragma once

#include "steincmp/common.hpp"
#include "steincmp/kernels.hpp"

#include <functional>
#include <string>
#include <vector>

namespace steincmp {

/// s_p(x | z): gradient of log p(x|z) in x, or p(x~|z)/p(x|z) - 1 componentwise for
/// discrete data (x~ is the cyclic increment).
struct CondScoreFn {
  using Evaluator = std::function<void(Point x, Point z, std::span<double> out)>;

  Evaluator evaluate;
  int data_dim = 0;
  int vocab_size = 0;  // 0 for continuous data
};

/// Marginal score x -> s_p(x), for models where it is available in closed form.
struct MarginalScoreFn {
  using Evaluator = std::function<void(Point x, std::span<double> out)>;

  Evaluator evaluate;
  int data_dim = 0;
};

/// m posterior draws for one observation, one draw per row.
struct LatentBatch {
  RowMatrix draws;
  int burn_in = 0;
  std::string sampler;
  std::uint64_t seed = 0;
  double acceptance_rate = 1.0;

  Eigen::Index size() const { return draws.rows(); }
  Point draw(Eigen::Index j) const { return row_of(draws, j); }
};

/// Row i holds the averaged conditional score at observation i.
struct ScoreMatrix {
  RowMatrix values;

  Eigen::Index size() const { return values.rows(); }
  Point row(Eigen::Index i) const { return row_of(values, i); }
};

struct SteinGram {
  Matrix h;
  bool diag_valid = false;
  KernelSpec kernel;

  Eigen::Index size() const { return h.rows(); }
};

ScoreMatrix average_scores(const CondScoreFn& score_fn, const Dataset& data,
                           std::span<const LatentBatch> latents);

/// Rows are the exact marginal scores; the m -> infinity limit of average_scores.
ScoreMatrix marginal_scores(const MarginalScoreFn& score_fn, const Dataset& data);

/// Full n x n Stein kernel matrix, diagonal included. Each unordered pair is computed
/// once and mirrored, so the result is exactly symmetric and independent of the worker
/// count.
SteinGram stein_gram(const ScoreMatrix& scores, const Dataset& data, const KernelSpec& kernel);

/// Entrywise gram_p - gram_q. Warns on stderr when the two grams used different kernels.
SteinGram diff_gram(const SteinGram& gram_p, const SteinGram& gram_q);

/// Dense dump: CSV (one row per line, %.17g) or binary (uint64 n, then n*n row-major doubles,
/// little endian).
void write_gram_csv(const SteinGram& gram, const std::string& path);
void write_gram_binary(const SteinGram& gram, const std::string& path);

}  // namespace steincmp
