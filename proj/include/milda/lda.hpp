#pragma once

#include "milda/model.hpp"

namespace milda {

enum class LdaVariant { Fisher, QWeighted };

/// Unit vector along (S+ + S-)^{-1}(mu+ - mu-), oriented so that its inner
/// product with mu+ - mu- is positive.
Vector fisher_direction(const ClassStats& cs);

/// Unit vector along (q S+ + (1-q) S-)^{-1}(mu+ - mu-), same orientation.
Vector qweighted_direction(const ClassStats& cs);

Vector lda_direction(const ClassStats& cs, LdaVariant variant);

/// Projected midpoint of the class means, w^T (mu+ + mu-) / 2.
double lda_threshold(const ClassStats& cs, const Vector& w);

inline constexpr const char* kLdaThresholdRule = "projected-class-mean-midpoint";

/// Classifier from known statistics ("ideal" LDA): identity transform,
/// midpoint threshold, positive orientation.
ProjectionModel lda_fit(const ClassStats& cs, LdaVariant variant = LdaVariant::Fisher);

/// Classifier from labelled samples via class_stats.
ProjectionModel lda_fit(const LabeledSampleSet& ls, LdaVariant variant = LdaVariant::Fisher);

}  // namespace milda
