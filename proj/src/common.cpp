#include "steincmp/common.hpp"

#include <cmath>

namespace steincmp {

Dataset::Dataset(RowMatrix pts, int vocab) : points(std::move(pts)), vocab_size(vocab) {
  if (vocab_size < 0 || vocab_size == 1) {
    throw std::invalid_argument("Dataset: vocabulary size must be 0 (continuous) or > 1");
  }
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index d = 0; d < points.cols(); ++d) {
      const double v = points(i, d);
      if (!std::isfinite(v)) {
        throw std::invalid_argument("Dataset: non-finite entry at row " + std::to_string(i));
      }
      if (discrete() && (v != std::floor(v) || v < 0 || v >= vocab_size)) {
        throw std::invalid_argument("Dataset: symbol out of range [0, L) at row " +
                                    std::to_string(i));
      }
    }
  }
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint64_t role) {
  std::uint64_t s = master;
  std::uint64_t h = splitmix64(s);
  s = h ^ (index * 0xD1B54A32D192ED03ULL);
  h = splitmix64(s);
  s = h ^ (role * 0x8CB92BA72F3D8DD7ULL);
  return splitmix64(s);
}

}  // namespace steincmp
