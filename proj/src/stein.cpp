#include "steincmp/stein.hpp"

#include "steincmp/parallel.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

namespace steincmp {

ScoreMatrix average_scores(const CondScoreFn& score_fn, const Dataset& data,
                           std::span<const LatentBatch> latents) {
  const Eigen::Index n = data.size();
  const Eigen::Index dim = data.dim();
  if (static_cast<Eigen::Index>(latents.size()) != n) {
    throw std::invalid_argument("average_scores: " + std::to_string(latents.size()) +
                                " latent batches for " + std::to_string(n) + " observations");
  }
  if (score_fn.data_dim != dim) {
    throw std::invalid_argument("average_scores: score dimension does not match data dimension");
  }

  ScoreMatrix out{RowMatrix::Zero(n, dim)};
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t ui) {
    const auto i = static_cast<Eigen::Index>(ui);
    const LatentBatch& batch = latents[ui];
    if (batch.size() < 1) {
      throw std::invalid_argument("average_scores: empty latent batch at observation " +
                                  std::to_string(ui));
    }
    std::vector<double> buf(static_cast<std::size_t>(dim));
    Eigen::Map<Eigen::RowVectorXd> s(buf.data(), dim);
    auto acc = out.values.row(i);
    for (Eigen::Index j = 0; j < batch.size(); ++j) {
      score_fn.evaluate(data.row(i), batch.draw(j), buf);
      if (!s.allFinite()) throw NonFiniteScore(ui, static_cast<std::size_t>(j));
      acc += s;
    }
    acc /= static_cast<double>(batch.size());
  });
  return out;
}

ScoreMatrix marginal_scores(const MarginalScoreFn& score_fn, const Dataset& data) {
  const Eigen::Index n = data.size();
  const Eigen::Index dim = data.dim();
  if (score_fn.data_dim != dim) {
    throw std::invalid_argument("marginal_scores: score dimension does not match data dimension");
  }
  ScoreMatrix out{RowMatrix::Zero(n, dim)};
  for (Eigen::Index i = 0; i < n; ++i) {
    std::span<double> row(out.values.data() + i * dim, static_cast<std::size_t>(dim));
    score_fn.evaluate(data.row(i), row);
    if (!out.values.row(i).allFinite()) throw NonFiniteScore(static_cast<std::size_t>(i), 0);
  }
  return out;
}

SteinGram stein_gram(const ScoreMatrix& scores, const Dataset& data, const KernelSpec& kernel) {
  const Eigen::Index n = data.size();
  const Eigen::Index dim = data.dim();
  if (scores.size() != n || scores.values.cols() != dim) {
    throw std::invalid_argument("stein_gram: score matrix shape does not match the data");
  }
  if (kernel.discrete() != data.discrete()) {
    throw std::invalid_argument("stein_gram: kernel domain does not match data domain");
  }
  if (kernel.discrete() && kernel.vocab_size != data.vocab_size) {
    throw std::invalid_argument("stein_gram: kernel vocabulary does not match data vocabulary");
  }

  SteinGram gram{Matrix::Zero(n, n), true, kernel};
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t ui) {
    const auto i = static_cast<Eigen::Index>(ui);
    std::vector<double> k1_ij(static_cast<std::size_t>(dim));
    std::vector<double> k1_ji(static_cast<std::size_t>(dim));
    const Point xi = data.row(i);
    const Point si = scores.row(i);
    for (Eigen::Index j = i; j < n; ++j) {
      const Point sj = scores.row(j);
      const PairTerms t = pair_terms(kernel, xi, data.row(j), k1_ij, k1_ji);
      double ss = 0.0;
      double s_k1 = 0.0;
      for (Eigen::Index d = 0; d < dim; ++d) {
        const auto ud = static_cast<std::size_t>(d);
        ss += si[ud] * sj[ud];
        s_k1 += si[ud] * k1_ji[ud] + k1_ij[ud] * sj[ud];
      }
      const double h = ss * t.k + s_k1 + t.trace;
      gram.h(i, j) = h;
      gram.h(j, i) = h;
    }
  });
  return gram;
}

SteinGram diff_gram(const SteinGram& gram_p, const SteinGram& gram_q) {
  if (gram_p.size() != gram_q.size()) {
    throw std::invalid_argument("diff_gram: gram sizes differ");
  }
  if (!(gram_p.kernel == gram_q.kernel)) {
    std::cerr << "steincmp: warning: comparing grams built with different kernels ("
              << to_string(gram_p.kernel.kind) << " vs " << to_string(gram_q.kernel.kind)
              << ")\n";
  }
  return SteinGram{gram_p.h - gram_q.h, gram_p.diag_valid && gram_q.diag_valid, gram_p.kernel};
}

void write_gram_csv(const SteinGram& gram, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  char buf[32];
  for (Eigen::Index i = 0; i < gram.size(); ++i) {
    for (Eigen::Index j = 0; j < gram.size(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", gram.h(i, j));
      out << (j ? "," : "") << buf;
    }
    out << '\n';
  }
}

void write_gram_binary(const SteinGram& gram, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  const auto n = static_cast<std::uint64_t>(gram.size());
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  const RowMatrix rows = gram.h;
  out.write(reinterpret_cast<const char*>(rows.data()),
            static_cast<std::streamsize>(rows.size() * sizeof(double)));
}

}  // namespace steincmp
