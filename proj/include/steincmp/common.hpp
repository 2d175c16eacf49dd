#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>

namespace steincmp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Rng = std::mt19937_64;

/// A point in R^D or {0..L-1}^D. Discrete symbols are stored as exact doubles.
using Point = std::span<const double>;

inline Point row_of(const RowMatrix& m, Eigen::Index i) {
  return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

/// Raised for malformed experiment/model configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A conditional score evaluated to NaN/Inf. Carries the observation and draw index.
class NonFiniteScore : public std::runtime_error {
 public:
  NonFiniteScore(std::size_t observation, std::size_t draw)
      : std::runtime_error("non-finite conditional score at observation " +
                           std::to_string(observation) + ", draw " + std::to_string(draw)),
        observation_(observation),
        draw_(draw) {}

  std::size_t observation() const { return observation_; }
  std::size_t draw() const { return draw_; }

 private:
  std::size_t observation_;
  std::size_t draw_;
};

/// Observations in R^D (vocab_size == 0) or {0..L-1}^D (vocab_size == L).
struct Dataset {
  RowMatrix points;
  int vocab_size = 0;

  Dataset() = default;
  explicit Dataset(RowMatrix pts, int vocab = 0);

  Eigen::Index size() const { return points.rows(); }
  Eigen::Index dim() const { return points.cols(); }
  bool discrete() const { return vocab_size > 0; }
  Point row(Eigen::Index i) const { return row_of(points, i); }
};

// splitmix64 step; also the building block of seed derivation.
std::uint64_t splitmix64(std::uint64_t& state);

/// Child seed for (index, role) under a master seed. Stable across releases.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint64_t role);

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace steincmp
