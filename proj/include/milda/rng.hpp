#pragma once

// Counter-based SplitMix64 generator. Every experiment run gets its own
// stream via derive_seed(base, tags...), so results do not depend on the
// order in which runs are executed.

#include <cstdint>
#include <initializer_list>

#include "milda/model.hpp"

namespace milda {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Mixes a base seed with a list of stream tags (experiment id, sweep index,
/// run index, ...). Distinct tag lists give statistically independent streams.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags) noexcept;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) noexcept;
  /// Standard normal (polar Box-Muller, cached pair).
  double normal() noexcept;

  Vector uniform_vector(Eigen::Index n, double lo, double hi) noexcept;
  Vector normal_vector(Eigen::Index n) noexcept;

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Draws n rows from N(mean, cov) using a Cholesky factor of cov. Throws
/// NotPositiveDefinite if cov is not positive definite.
Matrix sample_gaussian(Rng& rng, Eigen::Index n, const Vector& mean, const Matrix& cov);

}  // namespace milda
