#include "milda/milda.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "milda/estimators.hpp"

namespace milda {

namespace {

void require_dim(Eigen::Index expected, Eigen::Index got, const char* what) {
  if (expected != got) {
    raise(ErrorCode::DimensionMismatch,
          std::string(what) + ": expected dimension " + std::to_string(expected) +
              ", got " + std::to_string(got));
  }
}

double mean_row_norm(const Matrix& x) {
  return x.rowwise().norm().mean();
}

// Automatic alpha keeps ||alpha d|| on the scale of the samples.
double choose_alpha(const Matrix& x, const MildaOptions& opts) {
  double alpha = mean_row_norm(x);
  if (!(alpha > 0.0)) alpha = 1.0;
  alpha *= opts.alpha_scale;
  if (!(alpha != 0.0) || !std::isfinite(alpha)) {
    raise(ErrorCode::InvalidArgument, "alpha must be finite and non-zero");
  }
  return alpha;
}

// Effective raw-space weights: w^T (W x - shift) = (W w)^T x - w^T shift.
Vector effective_weights(const ProjectionModel& m) {
  return m.transform.whiten ? Vector(*m.transform.whiten * m.w) : m.w;
}

Vector raw_scores(const ProjectionModel& m, const Matrix& x) {
  const Vector v = effective_weights(m);
  const double offset = m.w.dot(m.transform.shift);
  return (x * v).array() - offset;
}

Matrix trace_normalized(const Matrix& a) {
  const double tr = a.trace();
  return tr > 0.0 ? Matrix(a / tr) : a;
}

Matrix subset_covariance(const Matrix& x, const Vector& scores, double thr,
                         bool high) {
  Eigen::Index n = 0;
  Vector sum = Vector::Zero(x.cols());
  Matrix outer = Matrix::Zero(x.cols(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if ((scores(i) >= thr) != high) continue;
    const Vector xi = x.row(i).transpose();
    sum += xi;
    outer.noalias() += xi * xi.transpose();
    ++n;
  }
  const Vector mean = sum / static_cast<double>(n);
  return symmetrize(outer / static_cast<double>(n) - mean * mean.transpose());
}

// Covariance-prior orientation: the known S+ and S- (up to scale) decide
// which score cluster is class +. Returns +1 (keep) or -1 (flip), 0 when the
// prior cannot tell the classes apart.
int covariance_vote(const Matrix& x, const Vector& scores,
                    const TwoMeansSplit& split, int orientation,
                    const KnownScaledClassCovariances& prior) {
  const Matrix sp = trace_normalized(prior.s_plus);
  const Matrix sm = trace_normalized(prior.s_minus);
  if ((sp - sm).norm() < 1e-8) return 0;
  if (split.low_count < 2 || split.high_count < 2) return 0;
  const Matrix hi = trace_normalized(subset_covariance(x, scores, split.threshold, true));
  const Matrix lo = trace_normalized(subset_covariance(x, scores, split.threshold, false));
  // Side labelled + by the current orientation.
  const Matrix& plus_side = orientation > 0 ? hi : lo;
  const Matrix& minus_side = orientation > 0 ? lo : hi;
  const double keep = (plus_side - sp).norm() + (minus_side - sm).norm();
  const double swap = (plus_side - sm).norm() + (minus_side - sp).norm();
  if (swap < keep) return -1;
  return 1;
}

}  // namespace

namespace detail {

PriorTransform build_transform(const Matrix& x, const GlobalStats& raw,
                               const PriorKnowledge& prior,
                               const MildaOptions& opts) {
  require_dim(x.cols(), prior.dim(), "prior");
  PriorTransform t;
  switch (prior.kind()) {
    case PriorKind::ClassMean: {
      t.shift = prior.get_if<KnownClassMean>()->mu_plus;
      break;
    }
    case PriorKind::DifferenceDirection: {
      const Vector d_hat = prior.get_if<KnownDifferenceDirection>()->d.normalized();
      t.alpha = choose_alpha(x, opts);
      t.shift = raw.mean - t.alpha * d_hat;
      t.d_hat = d_hat;
      break;
    }
    case PriorKind::ScaledClassCovariances:
    case PriorKind::SharedCovarianceShape: {
      Matrix s_hat;
      if (const auto* p = prior.get_if<KnownScaledClassCovariances>()) {
        s_hat = symmetrize(p->q * p->s_plus + (1.0 - p->q) * p->s_minus);
      } else {
        s_hat = prior.get_if<KnownSharedCovarianceShape>()->s;
      }
      const Matrix whiten = inv_sqrt_spd(s_hat);
      const Vector mean_w = whiten * raw.mean;
      const Matrix cov_w = symmetrize(whiten * raw.cov * whiten);
      Vector d_hat = top_eigenvector(cov_w).vector;
      const Matrix xw = x * whiten;
      // Eigenvector signs are basis dependent. Point d_hat along positive
      // skew of the projections so an affine map of data and prior cannot
      // flip the labels; near-symmetric projections keep the default sign.
      const Vector p = xw * d_hat;
      const double pm = p.mean();
      const double m2 = (p.array() - pm).square().mean();
      const double m3 = (p.array() - pm).cube().mean();
      if (m3 < -1e-9 * std::pow(m2, 1.5)) d_hat = -d_hat;
      t.alpha = choose_alpha(xw, opts);
      t.shift = mean_w - t.alpha * d_hat;
      t.d_hat = d_hat;
      t.whiten = whiten;
      break;
    }
  }
  return t;
}

ProjectionModel fit_from_moments(const Matrix& x, const GlobalStats& raw,
                                 const PriorKnowledge& prior,
                                 const MildaOptions& opts) {
  ProjectionModel m;
  m.transform = build_transform(x, raw, prior, opts);
  m.prior_kind = std::string(to_string(prior.kind()));

  Vector mean_t;
  Matrix cov_t;
  if (m.transform.whiten) {
    const Matrix& w = *m.transform.whiten;
    mean_t = w * raw.mean - m.transform.shift;
    cov_t = symmetrize(w * raw.cov * w);
  } else {
    mean_t = raw.mean - m.transform.shift;
    cov_t = raw.cov;
  }
  const double scale = std::sqrt(std::max(cov_t.trace(), 0.0));
  if (!(mean_t.norm() > 1e-12 * scale)) {
    raise(ErrorCode::DegenerateMean,
          "global mean of the transformed data vanishes; the known mean "
          "coincides with the data mean");
  }
  m.w = solve_spd(cov_t, mean_t).normalized();

  const Vector scores = raw_scores(m, x);
  const TwoMeansSplit split =
      two_means_split(std::span<const double>(scores.data(), scores.size()));
  m.threshold = split.threshold;

  switch (prior.kind()) {
    case PriorKind::ClassMean:
      // The known mean maps to the origin, whose score is zero.
      m.orientation = std::abs(split.high_mean) <= std::abs(split.low_mean) ? 1 : -1;
      break;
    case PriorKind::DifferenceDirection:
    case PriorKind::SharedCovarianceShape:
      m.orientation = m.w.dot(*m.transform.d_hat) >= 0.0 ? 1 : -1;
      break;
    case PriorKind::ScaledClassCovariances: {
      m.orientation = m.w.dot(*m.transform.d_hat) >= 0.0 ? 1 : -1;
      const int vote = covariance_vote(x, scores, split, m.orientation,
                                       *prior.get_if<KnownScaledClassCovariances>());
      if (vote < 0) m.orientation = -m.orientation;
      break;
    }
  }
  return m;
}

}  // namespace detail

PriorTransform build_transform(const SampleSet& s, const PriorKnowledge& prior,
                               const MildaOptions& opts) {
  return detail::build_transform(s.data(), global_stats(s), prior, opts);
}

SampleSet apply_transform(const PriorTransform& t, const SampleSet& s) {
  require_dim(t.dim(), s.dim(), "apply_transform");
  Matrix out = t.whiten ? Matrix(s.data() * *t.whiten) : s.data();
  out.rowwise() -= t.shift.transpose();
  return SampleSet(std::move(out));
}

ProjectionModel milda_fit(const SampleSet& s, const PriorKnowledge& prior,
                          const MildaOptions& opts) {
  return detail::fit_from_moments(s.data(), global_stats(s), prior, opts);
}

Vector score(const ProjectionModel& m, const SampleSet& s) {
  require_dim(m.dim(), s.dim(), "score");
  require_dim(m.transform.dim(), s.dim(), "score transform");
  return raw_scores(m, s.data());
}

std::vector<Label> classify(const ProjectionModel& m, const SampleSet& s) {
  const Vector sc = score(m, s);
  std::vector<Label> out(static_cast<std::size_t>(sc.size()));
  for (Eigen::Index i = 0; i < sc.size(); ++i) {
    out[i] = m.orientation * (sc(i) - m.threshold) >= 0.0 ? Label::Plus : Label::Minus;
  }
  return out;
}

Label classify_one(const ProjectionModel& m, const Vector& x) {
  require_dim(m.dim(), x.size(), "classify_one");
  const Vector xt = m.transform.whiten ? Vector(*m.transform.whiten * x) : x;
  const double s = m.w.dot(xt - m.transform.shift);
  return m.orientation * (s - m.threshold) >= 0.0 ? Label::Plus : Label::Minus;
}

double accuracy(std::span<const Label> predicted, std::span<const Label> truth) {
  if (predicted.size() != truth.size() || truth.empty()) {
    raise(ErrorCode::DimensionMismatch, "accuracy needs equal non-empty label vectors");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

TwoMeansSplit two_means_split(std::span<const double> scores) {
  const std::size_t n = scores.size();
  if (n == 0) raise(ErrorCode::EmptySet, "no scores to split");
  std::vector<double> s(scores.begin(), scores.end());
  std::sort(s.begin(), s.end());
  const double center = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(n);

  TwoMeansSplit best;
  if (n == 1) {
    best.threshold = best.low_mean = best.high_mean = s[0];
    best.high_count = 1;
    return best;
  }
  // Centering keeps the running sums well conditioned.
  double total = 0.0, total_sq = 0.0;
  for (double& v : s) {
    v -= center;
    total += v;
    total_sq += v * v;
  }
  double left = 0.0, left_sq = 0.0;
  double best_cost = std::numeric_limits<double>::infinity();
  std::size_t best_k = 1;
  double best_left = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    left += s[k - 1];
    left_sq += s[k - 1] * s[k - 1];
    const double nl = static_cast<double>(k);
    const double nr = static_cast<double>(n - k);
    const double right = total - left;
    const double cost = (left_sq - left * left / nl) + ((total_sq - left_sq) - right * right / nr);
    if (cost < best_cost) {
      best_cost = cost;
      best_k = k;
      best_left = left;
    }
  }
  best.threshold = center + 0.5 * (s[best_k - 1] + s[best_k]);
  best.low_count = static_cast<Eigen::Index>(best_k);
  best.high_count = static_cast<Eigen::Index>(n - best_k);
  best.low_mean = center + best_left / static_cast<double>(best_k);
  best.high_mean = center + (total - best_left) / static_cast<double>(n - best_k);
  best.wcss = std::max(best_cost, 0.0);
  return best;
}

}  // namespace milda
