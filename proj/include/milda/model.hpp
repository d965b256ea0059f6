#pragma once

// Shared domain types. Everything here is immutable after construction and
// validated on the way in; no algorithms live in this header.

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "milda/error.hpp"

namespace milda {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Throws NonFiniteEntry or EmptySet.
void validate(const Matrix& data);

/// Returns the error code validate() would raise, without throwing.
std::optional<ErrorCode> check(const Matrix& data) noexcept;

/// N x D observation matrix, one sample per row.
class SampleSet {
 public:
  explicit SampleSet(Matrix data);

  Eigen::Index size() const noexcept { return data_.rows(); }
  Eigen::Index dim() const noexcept { return data_.cols(); }
  const Matrix& data() const noexcept { return data_; }

 private:
  Matrix data_;
};

enum class Label : std::int8_t { Minus = -1, Plus = 1 };

constexpr int to_int(Label l) noexcept { return static_cast<int>(l); }
Label label_from_int(long v);

class LabeledSampleSet {
 public:
  LabeledSampleSet(SampleSet samples, std::vector<Label> labels);

  const SampleSet& samples() const noexcept { return samples_; }
  const std::vector<Label>& labels() const noexcept { return labels_; }
  Eigen::Index size() const noexcept { return samples_.size(); }
  Eigen::Index dim() const noexcept { return samples_.dim(); }
  Eigen::Index count(Label l) const noexcept;

 private:
  SampleSet samples_;
  std::vector<Label> labels_;
};

/// Per-class first and second moments plus the positive-class fraction q.
struct ClassStats {
  Vector mu_plus;
  Vector mu_minus;
  Matrix sigma_plus;
  Matrix sigma_minus;
  double q = 0.5;

  /// Validates shapes, symmetry (1e-10 relative) and 0 < q < 1, and stores
  /// symmetrized covariances.
  static ClassStats make(Vector mu_plus, Vector mu_minus, Matrix sigma_plus,
                         Matrix sigma_minus, double q);

  Eigen::Index dim() const noexcept { return mu_plus.size(); }
  Vector mean_difference() const { return mu_plus - mu_minus; }
  /// q * sigma_plus + (1 - q) * sigma_minus.
  Matrix weighted_scatter() const;
};

/// Mean and biased covariance of all samples, labels ignored.
struct GlobalStats {
  Vector mean;
  Matrix cov;

  static GlobalStats make(Vector mean, Matrix cov);
  Eigen::Index dim() const noexcept { return mean.size(); }
};

/// Global moments implied by exact class moments:
/// mean = q mu+ + (1-q) mu-, cov = weighted scatter + q(1-q) dd^T.
GlobalStats implied_global_stats(const ClassStats& cs);

struct KnownClassMean {
  Vector mu_plus;
};

/// d points from the negative towards the positive class (d ~ mu+ - mu-).
struct KnownDifferenceDirection {
  Vector d;
};

/// S+ and S- are the class covariances up to one common unknown scale.
struct KnownScaledClassCovariances {
  Matrix s_plus;
  Matrix s_minus;
  double q = 0.5;
};

/// S is proportional to both class covariances.
struct KnownSharedCovarianceShape {
  Matrix s;
};

enum class PriorKind {
  ClassMean,
  DifferenceDirection,
  ScaledClassCovariances,
  SharedCovarianceShape,
};

std::string_view to_string(PriorKind kind) noexcept;
PriorKind prior_kind_from_string(std::string_view name);

/// The single piece of ground truth that replaces labels.
class PriorKnowledge {
 public:
  using Variant = std::variant<KnownClassMean, KnownDifferenceDirection,
                               KnownScaledClassCovariances,
                               KnownSharedCovarianceShape>;

  // Each constructor validates the variant's invariants.
  PriorKnowledge(KnownClassMean p);
  PriorKnowledge(KnownDifferenceDirection p);
  PriorKnowledge(KnownScaledClassCovariances p);
  PriorKnowledge(KnownSharedCovarianceShape p);

  PriorKind kind() const noexcept;
  Eigen::Index dim() const noexcept;
  const Variant& value() const noexcept { return value_; }

  template <typename T>
  const T* get_if() const noexcept {
    return std::get_if<T>(&value_);
  }

 private:
  Variant value_;
};

/// Affine pre-map x' = whiten * x - shift (or x - shift without whitening),
/// plus the bookkeeping of how it was derived from the prior.
struct PriorTransform {
  std::optional<Matrix> whiten;
  Vector shift;
  double alpha = 0.0;
  std::optional<Vector> d_hat;

  static PriorTransform identity(Eigen::Index dim);
  Eigen::Index dim() const noexcept { return shift.size(); }
};

/// A fitted linear classifier: label + iff orientation * (score - threshold)
/// >= 0, where score = w^T transform(x).
struct ProjectionModel {
  Vector w;
  double threshold = 0.0;
  int orientation = 1;
  PriorTransform transform;
  std::string prior_kind;

  Eigen::Index dim() const noexcept { return w.size(); }
};

bool is_symmetric(const Matrix& a, double rel_tol = 1e-10);
Matrix symmetrize(const Matrix& a);

}  // namespace milda
