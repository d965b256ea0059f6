#pragma once

// Two-cluster K-means++ and full-covariance GMM with a prior-knowledge step
// after every iteration:
//   class mean known       mu_1 <- (1 - lambda) mu_1 + lambda mu+
//   direction d known      mu_k <- m + ((1 - lambda) I + lambda d d^T)(mu_k - m)
//   covariances known      K-means: means unchanged
//                          GMM: Sigma_k <- (1 - lambda) Sigma_k + lambda Sigma_+/-
// where m is the global mean and d has unit norm.

#include <cstdint>
#include <vector>

#include "milda/model.hpp"

namespace milda {

struct BaselineConfig {
  double lambda = 0.7;
  int max_iters = 300;
  double tol = 1e-6;
  /// Attempts with fresh seeds after EmptyCluster / CovarianceCollapse.
  int restarts = 5;
  /// Independent initializations per fit; the best objective wins, ties go to
  /// the lowest replicate index.
  int replicates = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Component 0 is paired with class +, component 1 with class -.
struct MixtureState {
  std::vector<Vector> means;
  std::vector<Matrix> covariances;  // GMM only
  std::vector<double> weights;      // GMM only
  std::vector<Label> assignments;
  /// K-means: within-cluster sum of squares before the prior step.
  /// GMM: log-likelihood after each E step.
  std::vector<double> objective_trace;
  int iterations = 0;
  int attempt = 0;  // restart index that produced this state
};

MixtureState kmeans_prior_fit(const SampleSet& s, const PriorKnowledge& prior,
                              const BaselineConfig& cfg = {});

MixtureState gmm_prior_fit(const SampleSet& s, const PriorKnowledge& prior,
                           const BaselineConfig& cfg = {});

/// Plain K-means++ / EM: the same algorithms with every prior step disabled
/// and components ordered as initialized.
MixtureState kmeans_fit(const SampleSet& s, const BaselineConfig& cfg = {});
MixtureState gmm_fit(const SampleSet& s, const BaselineConfig& cfg = {});

/// Nearest-mean labels for new samples.
std::vector<Label> kmeans_predict(const MixtureState& m, const SampleSet& s);
/// Maximum-posterior labels for new samples.
std::vector<Label> gmm_predict(const MixtureState& m, const SampleSet& s);

}  // namespace milda
