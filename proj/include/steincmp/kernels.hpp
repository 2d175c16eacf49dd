#pragma once

// Positive-definite kernels on R^D and {0..L-1}^D together with the
// derivative/difference terms the Stein kernel needs:
//   k1(x, y)      gradient (continuous) or backward difference (discrete) in x
//   tr[k12](x, y) trace of the mixed second derivative/difference

#include "steincmp/common.hpp"

#include <string>
#include <vector>

namespace steincmp {

class Bandwidth {
 public:
  explicit Bandwidth(double lambda);
  double value() const { return lambda_; }

 private:
  double lambda_;
};

enum class KernelKind {
  GaussianSq,    // exp(-|x-y|^2 / lambda^2)
  GaussianHalf,  // exp(-|x-y|^2 / (2 lambda^2))
  BoWGaussian,   // exp(-|B(x)-B(y)|^2 / (2D)), B = word counts over L symbols
  ExpHamming,    // exp(-#{d : x_d != y_d} / D)
};

struct KernelSpec {
  KernelKind kind = KernelKind::GaussianSq;
  double lambda = 1.0;  // continuous variants only
  int vocab_size = 0;   // discrete variants only

  static KernelSpec gaussian_sq(Bandwidth bw) { return {KernelKind::GaussianSq, bw.value(), 0}; }
  static KernelSpec gaussian_half(Bandwidth bw) {
    return {KernelKind::GaussianHalf, bw.value(), 0};
  }
  static KernelSpec bow_gaussian(int vocab_size);
  static KernelSpec exp_hamming(int vocab_size);

  bool discrete() const {
    return kind == KernelKind::BoWGaussian || kind == KernelKind::ExpHamming;
  }

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

std::string to_string(KernelKind kind);
KernelKind kernel_kind_from_string(const std::string& name);

double eval(const KernelSpec& spec, Point x, Point y);

// Continuous variants.
Vector grad1(const KernelSpec& spec, Point x, Point y);
double trace12(const KernelSpec& spec, Point x, Point y);

// Discrete variants. Component d of diff_back_1 is k(x, y) - k(x with x_d <- x_d - 1 mod L, y).
Vector diff_back_1(const KernelSpec& spec, Point x, Point y);
double trace12_discrete(const KernelSpec& spec, Point x, Point y);

/// All kernel terms for one unordered pair, in one pass.
struct PairTerms {
  double k = 0.0;
  double trace = 0.0;
};

/// Fills k1_xy = k1(x, y) and k1_yx = k1(y, x) and returns k(x, y) and tr[k12](x, y).
/// Dispatches on the kernel domain; discrete variants use O(1) incremental updates per
/// coordinate.
PairTerms pair_terms(const KernelSpec& spec, Point x, Point y, std::span<double> k1_xy,
                     std::span<double> k1_yx);

/// Median of all pairwise Euclidean distances. Discrete data is measured in its
/// bag-of-words representation.
Bandwidth median_heuristic(const Dataset& data);

// Generic difference operators over an arbitrary kernel callable on {0..L-1}^D.
// These enumerate the shifted points directly and serve as the reference for the
// incremental paths above.
template <class K>
Vector backward_difference_1(K&& k, Point x, Point y, int vocab_size) {
  const std::size_t dim = x.size();
  std::vector<double> shifted(x.begin(), x.end());
  Vector out(static_cast<Eigen::Index>(dim));
  const double base = k(x, y);
  for (std::size_t d = 0; d < dim; ++d) {
    shifted[d] = static_cast<double>((static_cast<int>(x[d]) + vocab_size - 1) % vocab_size);
    out(static_cast<Eigen::Index>(d)) = base - k(Point(shifted), y);
    shifted[d] = x[d];
  }
  return out;
}

template <class K>
double mixed_backward_difference_trace(K&& k, Point x, Point y, int vocab_size) {
  const std::size_t dim = x.size();
  std::vector<double> xs(x.begin(), x.end());
  std::vector<double> ys(y.begin(), y.end());
  const double base = k(x, y);
  double total = 0.0;
  for (std::size_t d = 0; d < dim; ++d) {
    xs[d] = static_cast<double>((static_cast<int>(x[d]) + vocab_size - 1) % vocab_size);
    ys[d] = static_cast<double>((static_cast<int>(y[d]) + vocab_size - 1) % vocab_size);
    total += base - k(Point(xs), y) - k(x, Point(ys)) + k(Point(xs), Point(ys));
    xs[d] = x[d];
    ys[d] = y[d];
  }
  return total;
}

}  // namespace steincmp
