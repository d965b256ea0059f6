#include "milda/lda.hpp"

#include "milda/estimators.hpp"

namespace milda {

namespace {

Vector oriented_solution(const Matrix& scatter, const Vector& diff) {
  if (!(diff.norm() > 0.0)) {
    raise(ErrorCode::CoincidentMeans, "class means coincide");
  }
  Vector w = solve_spd(scatter, diff);
  if (w.dot(diff) < 0.0) w = -w;
  return w.normalized();
}

}  // namespace

Vector fisher_direction(const ClassStats& cs) {
  return oriented_solution(symmetrize(cs.sigma_plus + cs.sigma_minus),
                           cs.mean_difference());
}

Vector qweighted_direction(const ClassStats& cs) {
  return oriented_solution(cs.weighted_scatter(), cs.mean_difference());
}

Vector lda_direction(const ClassStats& cs, LdaVariant variant) {
  return variant == LdaVariant::Fisher ? fisher_direction(cs)
                                       : qweighted_direction(cs);
}

double lda_threshold(const ClassStats& cs, const Vector& w) {
  return 0.5 * w.dot(cs.mu_plus + cs.mu_minus);
}

ProjectionModel lda_fit(const ClassStats& cs, LdaVariant variant) {
  ProjectionModel m;
  m.w = lda_direction(cs, variant);
  m.threshold = lda_threshold(cs, m.w);
  m.orientation = 1;
  m.transform = PriorTransform::identity(cs.dim());
  m.prior_kind = variant == LdaVariant::Fisher ? "lda_fisher" : "lda_qweighted";
  return m;
}

ProjectionModel lda_fit(const LabeledSampleSet& ls, LdaVariant variant) {
  return lda_fit(class_stats(ls), variant);
}

}  // namespace milda
