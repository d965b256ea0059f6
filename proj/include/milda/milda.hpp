#pragma once

// Label-free LDA: one known statistic is turned into an affine pre-map after
// which the class means are collinear, and the projection is then
// w ~ inverse(global covariance) * global mean on the mapped data.

#include <span>
#include <vector>

#include "milda/model.hpp"

namespace milda {

struct MildaOptions {
  /// Multiplies the automatic alpha (mean row norm of the possibly whitened
  /// data). Only affects the difference-direction and covariance priors.
  double alpha_scale = 1.0;
};

/// Derives the pre-map for the given prior. For the covariance priors the
/// difference direction is the top eigenvector of the whitened global
/// covariance, which fails with DegenerateSpectrum when that eigenvector is
/// not identifiable.
PriorTransform build_transform(const SampleSet& s, const PriorKnowledge& prior,
                               const MildaOptions& opts = {});

/// x' = whiten * x - shift, row by row (whitening first).
SampleSet apply_transform(const PriorTransform& t, const SampleSet& s);

ProjectionModel milda_fit(const SampleSet& s, const PriorKnowledge& prior,
                          const MildaOptions& opts = {});

/// w^T transform(x) per row. The threshold does not enter.
Vector score(const ProjectionModel& m, const SampleSet& s);

/// Label + iff orientation * (score - threshold) >= 0.
std::vector<Label> classify(const ProjectionModel& m, const SampleSet& s);

/// Single-sample classify without building a SampleSet.
Label classify_one(const ProjectionModel& m, const Vector& x);

double accuracy(std::span<const Label> predicted, std::span<const Label> truth);

/// Best split of 1-D scores into two groups by within-group sum of squares,
/// found by scanning every boundary between consecutive sorted values.
struct TwoMeansSplit {
  double threshold = 0.0;
  double low_mean = 0.0;
  double high_mean = 0.0;
  Eigen::Index low_count = 0;
  Eigen::Index high_count = 0;
  double wcss = 0.0;
};

TwoMeansSplit two_means_split(std::span<const double> scores);

inline constexpr const char* kMildaThresholdRule = "two-means-1d-wcss";

namespace detail {

// Fit from precomputed raw-data moments; x supplies the rows used for alpha,
// the threshold and orientation. Used by the sliding-window refit.
PriorTransform build_transform(const Matrix& x, const GlobalStats& raw,
                               const PriorKnowledge& prior,
                               const MildaOptions& opts);

ProjectionModel fit_from_moments(const Matrix& x, const GlobalStats& raw,
                                 const PriorKnowledge& prior,
                                 const MildaOptions& opts);

}  // namespace detail

}  // namespace milda
