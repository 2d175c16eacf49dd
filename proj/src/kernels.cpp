#include "steincmp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace steincmp {

namespace {

void require_same_dim(Point x, Point y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("kernel: dimension mismatch (" + std::to_string(x.size()) +
                                " vs " + std::to_string(y.size()) + ")");
  }
  if (x.empty()) {
    throw std::invalid_argument("kernel: zero-dimensional points");
  }
}

int symbol(double v, int vocab_size) {
  const int s = static_cast<int>(v);
  if (v != static_cast<double>(s) || s < 0 || s >= vocab_size) {
    throw std::invalid_argument("kernel: symbol out of range [0, " + std::to_string(vocab_size) +
                                ")");
  }
  return s;
}

void require_continuous(const KernelSpec& spec, const char* op) {
  if (spec.discrete()) {
    throw std::invalid_argument(std::string(op) + ": continuous kernel required, got " +
                                to_string(spec.kind));
  }
}

void require_discrete(const KernelSpec& spec, const char* op) {
  if (!spec.discrete()) {
    throw std::invalid_argument(std::string(op) + ": discrete kernel required, got " +
                                to_string(spec.kind));
  }
}

// exp(-exponent_scale * r^2); gradient factor is 2 * exponent_scale.
double exponent_scale(const KernelSpec& spec) {
  const double l2 = spec.lambda * spec.lambda;
  return spec.kind == KernelKind::GaussianSq ? 1.0 / l2 : 0.5 / l2;
}

double squared_distance(Point x, Point y) {
  double r2 = 0.0;
  for (std::size_t d = 0; d < x.size(); ++d) {
    const double diff = x[d] - y[d];
    r2 += diff * diff;
  }
  return r2;
}

int decrement(int s, int vocab_size) { return (s + vocab_size - 1) % vocab_size; }

// Count difference B(x) - B(y) with its squared norm, edited in place.
class BowDelta {
 public:
  BowDelta(Point x, Point y, int vocab_size) : delta_(static_cast<std::size_t>(vocab_size), 0) {
    for (std::size_t d = 0; d < x.size(); ++d) {
      ++delta_[static_cast<std::size_t>(symbol(x[d], vocab_size))];
      --delta_[static_cast<std::size_t>(symbol(y[d], vocab_size))];
    }
    for (long v : delta_) norm_ += v * v;
  }

  void shift(int index, long c) {
    long& v = delta_[static_cast<std::size_t>(index)];
    norm_ += 2 * c * v + c * c;
    v += c;
  }
  long norm() const { return norm_; }

 private:
  std::vector<long> delta_;
  long norm_ = 0;
};

PairTerms bow_pair_terms(const KernelSpec& spec, Point x, Point y, std::span<double> k1_xy,
                         std::span<double> k1_yx) {
  const int vocab = spec.vocab_size;
  const double denom = 2.0 * static_cast<double>(x.size());
  auto kval = [denom](long s) { return std::exp(-static_cast<double>(s) / denom); };

  BowDelta delta(x, y, vocab);
  PairTerms out;
  out.k = kval(delta.norm());
  for (std::size_t d = 0; d < x.size(); ++d) {
    const int v = static_cast<int>(x[d]);
    const int vm = decrement(v, vocab);
    const int w = static_cast<int>(y[d]);
    const int wm = decrement(w, vocab);

    // x_d -> x_d - 1 moves one count of B(x) from v to vm.
    delta.shift(v, -1);
    delta.shift(vm, +1);
    const double k_x = kval(delta.norm());
    // y_d -> y_d - 1 moves one count of B(y) from w to wm, i.e. delta[w] += 1, delta[wm] -= 1.
    delta.shift(w, +1);
    delta.shift(wm, -1);
    const double k_xy = kval(delta.norm());
    delta.shift(vm, -1);
    delta.shift(v, +1);
    const double k_y = kval(delta.norm());
    delta.shift(wm, +1);
    delta.shift(w, -1);

    k1_xy[d] = out.k - k_x;
    k1_yx[d] = out.k - k_y;
    out.trace += out.k - k_x - k_y + k_xy;
  }
  return out;
}

PairTerms hamming_pair_terms(const KernelSpec& spec, Point x, Point y, std::span<double> k1_xy,
                             std::span<double> k1_yx) {
  const int vocab = spec.vocab_size;
  const double dim = static_cast<double>(x.size());
  long mismatches = 0;
  for (std::size_t d = 0; d < x.size(); ++d) {
    mismatches += symbol(x[d], vocab) != symbol(y[d], vocab) ? 1 : 0;
  }
  auto kval = [dim](long h) { return std::exp(-static_cast<double>(h) / dim); };

  PairTerms out;
  out.k = kval(mismatches);
  for (std::size_t d = 0; d < x.size(); ++d) {
    const int v = static_cast<int>(x[d]);
    const int w = static_cast<int>(y[d]);
    const int vm = decrement(v, vocab);
    const int wm = decrement(w, vocab);
    const long rest = mismatches - (v != w ? 1 : 0);
    const double k_x = kval(rest + (vm != w ? 1 : 0));
    const double k_y = kval(rest + (v != wm ? 1 : 0));
    const double k_xy = kval(rest + (vm != wm ? 1 : 0));
    k1_xy[d] = out.k - k_x;
    k1_yx[d] = out.k - k_y;
    out.trace += out.k - k_x - k_y + k_xy;
  }
  return out;
}

}  // namespace

Bandwidth::Bandwidth(double lambda) : lambda_(lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("Bandwidth: lambda must be a positive finite number");
  }
}

KernelSpec KernelSpec::bow_gaussian(int vocab_size) {
  if (vocab_size < 2) throw std::invalid_argument("BoWGaussian: vocabulary size must be > 1");
  return {KernelKind::BoWGaussian, 1.0, vocab_size};
}

KernelSpec KernelSpec::exp_hamming(int vocab_size) {
  if (vocab_size < 2) throw std::invalid_argument("ExpHamming: vocabulary size must be > 1");
  return {KernelKind::ExpHamming, 1.0, vocab_size};
}

std::string to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::GaussianSq:
      return "gaussian-sq";
    case KernelKind::GaussianHalf:
      return "gaussian-half";
    case KernelKind::BoWGaussian:
      return "bow-gaussian";
    case KernelKind::ExpHamming:
      return "exp-hamming";
  }
  return "unknown";
}

KernelKind kernel_kind_from_string(const std::string& name) {
  if (name == "gaussian-sq") return KernelKind::GaussianSq;
  if (name == "gaussian-half") return KernelKind::GaussianHalf;
  if (name == "bow-gaussian") return KernelKind::BoWGaussian;
  if (name == "exp-hamming") return KernelKind::ExpHamming;
  throw std::invalid_argument("unknown kernel '" + name + "'");
}

double eval(const KernelSpec& spec, Point x, Point y) {
  require_same_dim(x, y);
  switch (spec.kind) {
    case KernelKind::GaussianSq:
    case KernelKind::GaussianHalf:
      return std::exp(-exponent_scale(spec) * squared_distance(x, y));
    case KernelKind::BoWGaussian:
      return std::exp(-static_cast<double>(BowDelta(x, y, spec.vocab_size).norm()) /
                      (2.0 * static_cast<double>(x.size())));
    case KernelKind::ExpHamming: {
      long h = 0;
      for (std::size_t d = 0; d < x.size(); ++d) {
        h += symbol(x[d], spec.vocab_size) != symbol(y[d], spec.vocab_size) ? 1 : 0;
      }
      return std::exp(-static_cast<double>(h) / static_cast<double>(x.size()));
    }
  }
  throw std::logic_error("eval: unhandled kernel kind");
}

Vector grad1(const KernelSpec& spec, Point x, Point y) {
  require_continuous(spec, "grad1");
  require_same_dim(x, y);
  const double e = exponent_scale(spec);
  const double k = std::exp(-e * squared_distance(x, y));
  Vector g(static_cast<Eigen::Index>(x.size()));
  for (std::size_t d = 0; d < x.size(); ++d) {
    g(static_cast<Eigen::Index>(d)) = -2.0 * e * (x[d] - y[d]) * k;
  }
  return g;
}

double trace12(const KernelSpec& spec, Point x, Point y) {
  require_continuous(spec, "trace12");
  require_same_dim(x, y);
  const double c = 2.0 * exponent_scale(spec);
  const double r2 = squared_distance(x, y);
  const double k = std::exp(-0.5 * c * r2);
  return k * (c * static_cast<double>(x.size()) - c * c * r2);
}

Vector diff_back_1(const KernelSpec& spec, Point x, Point y) {
  require_discrete(spec, "diff_back_1");
  require_same_dim(x, y);
  Vector out(static_cast<Eigen::Index>(x.size()));
  std::vector<double> scratch(x.size());
  pair_terms(spec, x, y, std::span<double>(out.data(), x.size()), scratch);
  return out;
}

double trace12_discrete(const KernelSpec& spec, Point x, Point y) {
  require_discrete(spec, "trace12_discrete");
  require_same_dim(x, y);
  std::vector<double> a(x.size()), b(x.size());
  return pair_terms(spec, x, y, a, b).trace;
}

PairTerms pair_terms(const KernelSpec& spec, Point x, Point y, std::span<double> k1_xy,
                     std::span<double> k1_yx) {
  require_same_dim(x, y);
  if (k1_xy.size() != x.size() || k1_yx.size() != x.size()) {
    throw std::invalid_argument("pair_terms: output buffers must have the point dimension");
  }
  switch (spec.kind) {
    case KernelKind::GaussianSq:
    case KernelKind::GaussianHalf: {
      const double e = exponent_scale(spec);
      const double c = 2.0 * e;
      const double r2 = squared_distance(x, y);
      PairTerms out;
      out.k = std::exp(-e * r2);
      for (std::size_t d = 0; d < x.size(); ++d) {
        const double g = -c * (x[d] - y[d]) * out.k;
        k1_xy[d] = g;
        k1_yx[d] = -g;
      }
      out.trace = out.k * (c * static_cast<double>(x.size()) - c * c * r2);
      return out;
    }
    case KernelKind::BoWGaussian:
      return bow_pair_terms(spec, x, y, k1_xy, k1_yx);
    case KernelKind::ExpHamming:
      return hamming_pair_terms(spec, x, y, k1_xy, k1_yx);
  }
  throw std::logic_error("pair_terms: unhandled kernel kind");
}

Bandwidth median_heuristic(const Dataset& data) {
  const Eigen::Index n = data.size();
  if (n < 2) throw std::invalid_argument("median_heuristic: need at least two observations");

  RowMatrix rep;
  if (data.discrete()) {
    rep = RowMatrix::Zero(n, data.vocab_size);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index d = 0; d < data.dim(); ++d) {
        rep(i, static_cast<Eigen::Index>(data.points(i, d))) += 1.0;
      }
    }
  } else {
    rep = data.points;
  }

  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      dists.push_back(std::sqrt(squared_distance(row_of(rep, i), row_of(rep, j))));
    }
  }
  const std::size_t mid = dists.size() / 2;
  std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(mid), dists.end());
  double median = dists[mid];
  if (dists.size() % 2 == 0) {
    const double lower = *std::max_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (median + lower);
  }
  if (!(median > 0.0)) {
    throw std::invalid_argument("median_heuristic: median pairwise distance is zero");
  }
  return Bandwidth(median);
}

}  // namespace steincmp
