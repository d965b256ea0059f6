#pragma once

// Synthetic data for the ablation, sensor-array detection and
// non-stationary stream experiments. All generators are pure functions of
// their config and seed.

#include <cstdint>
#include <string_view>
#include <vector>

#include "milda/model.hpp"

namespace milda {

struct Dataset {
  LabeledSampleSet data;
  ClassStats truth;
};

// --- ablation ---------------------------------------------------------------

struct AblationConfig {
  Eigen::Index n = 1000;
  Eigen::Index d = 10;
  double rho = 0.3;
  Vector mu_plus;   // empty -> ( 1, 0, ..., 0)
  Vector mu_minus;  // empty -> (-1, 0, ..., 0)
  double sigma_blend = 1.0;
  double q = 0.5;
  std::uint64_t seed = 1;

  void validate() const;
  Vector resolved_mu_plus() const;
  Vector resolved_mu_minus() const;
};

/// Orthonormal eigenbasis of (1 - rho) I + rho J: column 0 is ones/sqrt(D),
/// columns 1..D-1 are Helmert contrasts.
Matrix ablation_eigenbasis(Eigen::Index d);

/// Sigma+ = (1 - rho) I + rho J.
Matrix ablation_sigma_plus(Eigen::Index d, double rho);
/// Same eigenvectors as Sigma+, descending eigenvalues cyclically shifted
/// by one position.
Matrix ablation_sigma_minus_default(Eigen::Index d, double rho);
/// (1 - sigma) Sigma+ + sigma Sigma-,default
Matrix ablation_sigma_minus(Eigen::Index d, double rho, double sigma_blend);

/// Class sizes are round(q N) and N - round(q N), in shuffled order. Sampling
/// goes through the shared eigenbasis, so rank-deficient covariances
/// (rho = 1) are emitted as is.
Dataset gen_ablation(const AblationConfig& cfg);

// --- sensor array -------------------------------------------------------------

enum class SensorProblem { ZeroMeanNoise, BinarySignal, KnownNoiseCovariance };

std::string_view to_string(SensorProblem p) noexcept;
SensorProblem sensor_problem_from_string(std::string_view name);

struct SensorConfig {
  SensorProblem problem = SensorProblem::ZeroMeanNoise;
  Eigen::Index d = 10;
  Eigen::Index n = 1000;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Noise parameters: Gaussian part N(0, 0.3 diag(sigma) + 0.7 J) and
/// interference alpha .* sin(pi t / 2 + phi).
struct NoiseParams {
  Vector sigma;
  Vector alpha;
  Vector phi;

  /// 0.3 diag(sigma) + 0.7 J + diag(alpha^2 / 2)
  Matrix covariance() const;
  Vector interference(std::int64_t t) const;
};

struct SensorDataset {
  LabeledSampleSet data;
  PriorKnowledge prior;
  ClassStats truth;
  Vector steering;         // a (a1 for the two-source problem)
  Vector steering_minus;   // a2, two-source problem only
  NoiseParams noise;
};

/// Class + is the noise-only class (ZeroMeanNoise, prior: its mean 0), the
/// s = +1/2 class (BinarySignal, prior: direction a) or the a1 source
/// (KnownNoiseCovariance, prior: the noise covariance shape). Exactly N/2
/// samples per class in shuffled order; t is the sample index.
SensorDataset gen_sensor(const SensorConfig& cfg);

// --- non-stationary stream ----------------------------------------------------

struct ChangeSchedule {
  std::int64_t total = 10000;
  std::int64_t sudden_cov_at = 2500;
  std::int64_t drift_begin = 5000;
  std::int64_t drift_end = 7500;
  std::int64_t sudden_steer_at = 7500;

  /// 0 < sudden_cov_at < drift_begin < drift_end <= sudden_steer_at < total.
  /// The drift may end exactly where the steering vector jumps.
  void validate() const;
  /// 0 before the covariance change, 1 until the drift, 2 during the drift,
  /// 3 after the steering change (and between drift end and that change).
  int epoch(std::int64_t t) const;
};

/// Sampled parameter set of one stream: the three noise states and three
/// steering vectors tied together by the schedule.
struct StreamAnchors {
  Vector a1, a2, a3;
  NoiseParams noise1, noise2, noise3;
};

struct StreamState {
  Vector steering;
  NoiseParams noise;
};

StreamAnchors draw_stream_anchors(Eigen::Index d, std::uint64_t seed);

/// Parameters in force at sample t. During the drift a and the noise
/// parameters move linearly; the steering direction follows the linear path
/// while its norm is interpolated separately.
StreamState stream_state(const ChangeSchedule& sch, const StreamAnchors& an, std::int64_t t);

struct StreamSample {
  Vector x;
  Label label;
  int epoch;
};

/// Zero-mean-noise detection stream: class + is noise only, class - adds the
/// steering vector. Labels are fair coin flips.
class StreamGenerator {
 public:
  StreamGenerator(ChangeSchedule schedule, Eigen::Index d, std::uint64_t seed);

  bool done() const noexcept { return t_ >= schedule_.total; }
  std::int64_t index() const noexcept { return t_; }
  StreamSample next();

  const StreamAnchors& anchors() const noexcept { return anchors_; }
  const ChangeSchedule& schedule() const noexcept { return schedule_; }
  /// Ground truth at time t (q = 0.5).
  ClassStats truth(std::int64_t t) const;

 private:
  ChangeSchedule schedule_;
  Eigen::Index d_;
  StreamAnchors anchors_;
  std::uint64_t sample_seed_;
  std::int64_t t_ = 0;
};

/// Whole stream as a dataset plus epoch tags.
struct StreamDump {
  LabeledSampleSet data;
  std::vector<int> epochs;
};

StreamDump gen_nonstationary(const ChangeSchedule& sch, Eigen::Index d, std::uint64_t seed);

}  // namespace milda
