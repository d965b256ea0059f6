#include "milda/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "milda/estimators.hpp"
#include "milda/rng.hpp"

namespace milda {

void BaselineConfig::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) raise(ErrorCode::ConfigError, "lambda must lie in [0, 1]");
  if (max_iters < 1) raise(ErrorCode::ConfigError, "max_iters must be positive");
  if (!(tol > 0.0)) raise(ErrorCode::ConfigError, "tol must be positive");
  if (restarts < 1) raise(ErrorCode::ConfigError, "restarts must be positive");
  if (replicates < 1) raise(ErrorCode::ConfigError, "replicates must be positive");
}

namespace {

struct PriorStep {
  std::optional<PriorKind> kind;
  double lambda = 0.0;
  Vector mu_plus;
  Vector d;
  Vector mbar;
  Matrix cov_plus;
  Matrix cov_minus;
};

PriorStep make_step(const Matrix& x, const PriorKnowledge* prior, double lambda) {
  PriorStep st;
  if (!prior) return st;
  if (prior->dim() != x.cols()) raise(ErrorCode::DimensionMismatch, "prior dimension");
  st.kind = prior->kind();
  st.lambda = lambda;
  st.mbar = x.colwise().mean().transpose();
  if (const auto* p = prior->get_if<KnownClassMean>()) {
    st.mu_plus = p->mu_plus;
  } else if (const auto* p = prior->get_if<KnownDifferenceDirection>()) {
    st.d = p->d.normalized();
  } else if (const auto* p = prior->get_if<KnownScaledClassCovariances>()) {
    st.cov_plus = p->s_plus;
    st.cov_minus = p->s_minus;
  } else if (const auto* p = prior->get_if<KnownSharedCovarianceShape>()) {
    st.cov_plus = p->s;
    st.cov_minus = p->s;
  }
  return st;
}

bool covariance_prior(const PriorStep& st) {
  return st.kind == PriorKind::ScaledClassCovariances ||
         st.kind == PriorKind::SharedCovarianceShape;
}

void update_means(const PriorStep& st, std::vector<Vector>& means) {
  if (!st.kind || st.lambda == 0.0) return;
  if (*st.kind == PriorKind::ClassMean) {
    means[0] = (1.0 - st.lambda) * means[0] + st.lambda * st.mu_plus;
  } else if (*st.kind == PriorKind::DifferenceDirection) {
    for (auto& mu : means) {
      const Vector off = mu - st.mbar;
      mu = st.mbar + (1.0 - st.lambda) * off + st.lambda * st.d * st.d.dot(off);
    }
  }
}

double sq_dist(const Matrix& x, Eigen::Index i, const Vector& c) {
  return (x.row(i).transpose() - c).squaredNorm();
}

std::vector<Vector> kmeanspp_seeds(const Matrix& x, Rng& rng) {
  const Eigen::Index n = x.rows();
  const auto first = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
  Vector c0 = x.row(first).transpose();
  Vector d2(n);
  for (Eigen::Index i = 0; i < n; ++i) d2(i) = sq_dist(x, i, c0);
  const double total = d2.sum();
  if (!(total > 0.0)) raise(ErrorCode::EmptyCluster, "all samples coincide");
  const double target = rng.uniform() * total;
  double acc = 0.0;
  Eigen::Index second = n - 1;
  for (Eigen::Index i = 0; i < n; ++i) {
    acc += d2(i);
    if (acc > target && d2(i) > 0.0) {
      second = i;
      break;
    }
  }
  if (!(d2(second) > 0.0)) {
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      if (d2(i) > 0.0) {
        second = i;
        break;
      }
    }
  }
  return {std::move(c0), Vector(x.row(second).transpose())};
}

std::vector<int> nearest(const Matrix& x, const std::vector<Vector>& means) {
  std::vector<int> a(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    a[i] = sq_dist(x, i, means[1]) < sq_dist(x, i, means[0]) ? 1 : 0;
  }
  return a;
}

Matrix partition_covariance(const Matrix& x, const std::vector<int>& a, int k) {
  Eigen::Index n = 0;
  Vector sum = Vector::Zero(x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    if (a[i] == k) {
      sum += x.row(i).transpose();
      ++n;
    }
  if (n < 2) return Matrix::Zero(x.cols(), x.cols());
  const Vector mean = sum / static_cast<double>(n);
  Matrix cov = Matrix::Zero(x.cols(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    if (a[i] == k) {
      const Vector c = x.row(i).transpose() - mean;
      cov.noalias() += c * c.transpose();
    }
  return cov / static_cast<double>(n);
}

// Orders the two components so that index 0 is paired with class +.
// Returns true when the caller should swap.
bool pair_after_init(const PriorStep& st, const Matrix& x, const std::vector<Vector>& seeds) {
  if (!st.kind) return false;
  if (*st.kind == PriorKind::ClassMean) {
    return (seeds[1] - st.mu_plus).norm() < (seeds[0] - st.mu_plus).norm();
  }
  if (covariance_prior(st)) {
    const auto a = nearest(x, seeds);
    const Matrix c0 = partition_covariance(x, a, 0);
    const Matrix c1 = partition_covariance(x, a, 1);
    const double keep = (st.cov_plus - c0).norm() + (st.cov_minus - c1).norm();
    const double swap = (st.cov_plus - c1).norm() + (st.cov_minus - c0).norm();
    return swap < keep;
  }
  return false;
}

// Difference-direction prior: class + lies further along d.
bool pair_at_end(const PriorStep& st, const std::vector<Vector>& means) {
  return st.kind == PriorKind::DifferenceDirection && st.d.dot(means[1]) > st.d.dot(means[0]);
}

std::vector<Label> to_labels(const std::vector<int>& a) {
  std::vector<Label> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] == 0 ? Label::Plus : Label::Minus;
  return out;
}

void swap_components(MixtureState& m) {
  std::swap(m.means[0], m.means[1]);
  if (m.covariances.size() == 2) std::swap(m.covariances[0], m.covariances[1]);
  if (m.weights.size() == 2) std::swap(m.weights[0], m.weights[1]);
}

double wcss(const Matrix& x, const std::vector<int>& a, const std::vector<Vector>& means) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) s += sq_dist(x, i, means[a[i]]);
  return s;
}

MixtureState kmeans_attempt(const Matrix& x, const PriorStep& st, const BaselineConfig& cfg,
                            std::uint64_t seed) {
  Rng rng(seed);
  MixtureState m;
  m.means = kmeanspp_seeds(x, rng);
  if (pair_after_init(st, x, m.means)) std::swap(m.means[0], m.means[1]);

  std::vector<int> a;
  for (int it = 0; it < cfg.max_iters; ++it) {
    auto next = nearest(x, m.means);
    m.objective_trace.push_back(wcss(x, next, m.means));
    const bool same = next == a;
    a = std::move(next);
    if (same) break;

    std::vector<Vector> sums(2, Vector::Zero(x.cols()));
    Eigen::Index counts[2] = {0, 0};
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      sums[a[i]] += x.row(i).transpose();
      ++counts[a[i]];
    }
    if (counts[0] == 0 || counts[1] == 0) {
      raise(ErrorCode::EmptyCluster, "a K-means cluster lost all its samples");
    }
    std::vector<Vector> updated = {sums[0] / static_cast<double>(counts[0]),
                                   sums[1] / static_cast<double>(counts[1])};
    update_means(st, updated);
    const double shift = std::max((updated[0] - m.means[0]).cwiseAbs().maxCoeff(),
                                  (updated[1] - m.means[1]).cwiseAbs().maxCoeff());
    m.means = std::move(updated);
    m.iterations = it + 1;
    if (shift < cfg.tol) break;
  }
  a = nearest(x, m.means);
  if (std::count(a.begin(), a.end(), 0) == 0 || std::count(a.begin(), a.end(), 1) == 0) {
    raise(ErrorCode::EmptyCluster, "final K-means partition has an empty cluster");
  }
  if (pair_at_end(st, m.means)) {
    std::swap(m.means[0], m.means[1]);
    for (auto& v : a) v = 1 - v;
  }
  m.assignments = to_labels(a);
  return m;
}

struct Component {
  Eigen::LLT<Matrix> llt;
  double log_norm = 0.0;  // log weight - log det / 2 - D log(2 pi) / 2
};

bool factor(const Matrix& cov, double weight, Component& c) {
  c.llt.compute(cov);
  if (c.llt.info() != Eigen::Success || !(c.llt.rcond() > 1e-12)) return false;
  const double logdet = 2.0 * c.llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  c.log_norm = std::log(weight) - 0.5 * logdet -
               0.5 * static_cast<double>(cov.rows()) * std::log(2.0 * M_PI);
  return true;
}

// Log densities (weighted) per sample and component.
Matrix log_densities(const Matrix& x, const MixtureState& m, const Component comp[2]) {
  Matrix ld(x.rows(), 2);
  for (int k = 0; k < 2; ++k) {
    Matrix centered = x.rowwise() - m.means[k].transpose();
    const Matrix z = comp[k].llt.matrixL().solve(centered.transpose());
    ld.col(k) = (-0.5 * z.colwise().squaredNorm().array() + comp[k].log_norm).matrix().transpose();
  }
  return ld;
}

double log_sum_exp(double a, double b) {
  const double hi = std::max(a, b);
  return hi + std::log(std::exp(a - hi) + std::exp(b - hi));
}

MixtureState gmm_attempt(const Matrix& x, const PriorStep& st, const BaselineConfig& cfg,
                         std::uint64_t seed) {
  const Eigen::Index n = x.rows();
  const Eigen::Index dim = x.cols();
  Rng rng(seed);
  MixtureState m;
  m.means = kmeanspp_seeds(x, rng);
  if (pair_after_init(st, x, m.means)) std::swap(m.means[0], m.means[1]);
  const Vector mean = x.colwise().mean().transpose();
  const Vector var = (x.rowwise() - mean.transpose()).colwise().squaredNorm().transpose() /
                     static_cast<double>(n);
  const Matrix init_cov = var.asDiagonal();
  m.covariances = {init_cov, init_cov};
  m.weights = {0.5, 0.5};

  bool regularized = false;
  Component comp[2];
  auto refactor = [&]() {
    for (int k = 0; k < 2; ++k) {
      if (factor(m.covariances[k], m.weights[k], comp[k])) continue;
      if (regularized) {
        raise(ErrorCode::CovarianceCollapse, "GMM covariance collapsed twice");
      }
      regularized = true;
      const double ridge = 1e-6 * m.covariances[k].trace() / static_cast<double>(dim);
      m.covariances[k] += std::max(ridge, 1e-300) * Matrix::Identity(dim, dim);
      if (!factor(m.covariances[k], m.weights[k], comp[k])) {
        raise(ErrorCode::CovarianceCollapse, "GMM covariance singular after regularization");
      }
    }
  };
  refactor();

  Matrix resp(n, 2);
  double prev_ll = -std::numeric_limits<double>::infinity();
  for (int it = 0; it < cfg.max_iters; ++it) {
    const Matrix ld = log_densities(x, m, comp);
    double ll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double lse = log_sum_exp(ld(i, 0), ld(i, 1));
      ll += lse;
      resp(i, 0) = std::exp(ld(i, 0) - lse);
      resp(i, 1) = 1.0 - resp(i, 0);
    }
    m.objective_trace.push_back(ll);
    if (std::abs(ll - prev_ll) < cfg.tol * std::abs(ll)) break;
    prev_ll = ll;

    for (int k = 0; k < 2; ++k) {
      const double nk = resp.col(k).sum();
      if (!(nk > 1e-8 * static_cast<double>(n))) {
        raise(ErrorCode::CovarianceCollapse, "GMM component lost all responsibility");
      }
      m.weights[k] = nk / static_cast<double>(n);
      m.means[k] = (x.transpose() * resp.col(k)) / nk;
      const Matrix centered = x.rowwise() - m.means[k].transpose();
      m.covariances[k] =
          symmetrize(centered.transpose() * resp.col(k).asDiagonal() * centered / nk);
    }
    update_means(st, m.means);
    if (covariance_prior(st) && st.lambda != 0.0) {
      m.covariances[0] = (1.0 - st.lambda) * m.covariances[0] + st.lambda * st.cov_plus;
      m.covariances[1] = (1.0 - st.lambda) * m.covariances[1] + st.lambda * st.cov_minus;
    }
    m.iterations = it + 1;
    refactor();
  }

  const Matrix ld = log_densities(x, m, comp);
  std::vector<int> a(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) a[i] = ld(i, 1) > ld(i, 0) ? 1 : 0;
  if (pair_at_end(st, m.means)) {
    swap_components(m);
    for (auto& v : a) v = 1 - v;
  }
  m.assignments = to_labels(a);
  return m;
}

template <typename Attempt>
MixtureState fit_with_restarts(const Matrix& x, const PriorStep& st, const BaselineConfig& cfg,
                               bool maximize, Attempt attempt) {
  std::optional<MixtureState> best;
  for (int r = 0; r < cfg.replicates; ++r) {
    std::optional<Error> last;
    for (int a = 0; a < cfg.restarts; ++a) {
      try {
        MixtureState m = attempt(x, st, cfg, derive_seed(cfg.seed, {std::uint64_t(r), std::uint64_t(a)}));
        m.attempt = a;
        const double obj = m.objective_trace.empty() ? 0.0 : m.objective_trace.back();
        const double best_obj = best && !best->objective_trace.empty() ? best->objective_trace.back() : 0.0;
        if (!best || (maximize ? obj > best_obj : obj < best_obj)) best = std::move(m);
        last.reset();
        break;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::EmptyCluster && e.code() != ErrorCode::CovarianceCollapse) throw;
        last = e;
      }
    }
    if (last && !best) throw *last;
  }
  return std::move(*best);
}

void check_inputs(const SampleSet& s, const BaselineConfig& cfg, Eigen::Index min_n) {
  cfg.validate();
  if (s.size() < min_n) {
    raise(ErrorCode::InvalidArgument, "need at least " + std::to_string(min_n) + " samples");
  }
}

}  // namespace

MixtureState kmeans_prior_fit(const SampleSet& s, const PriorKnowledge& prior,
                              const BaselineConfig& cfg) {
  check_inputs(s, cfg, 2);
  const PriorStep st = make_step(s.data(), &prior, cfg.lambda);
  return fit_with_restarts(s.data(), st, cfg, false, kmeans_attempt);
}

MixtureState gmm_prior_fit(const SampleSet& s, const PriorKnowledge& prior,
                           const BaselineConfig& cfg) {
  check_inputs(s, cfg, std::max<Eigen::Index>(2, 2 * s.dim()));
  const PriorStep st = make_step(s.data(), &prior, cfg.lambda);
  return fit_with_restarts(s.data(), st, cfg, true, gmm_attempt);
}

MixtureState kmeans_fit(const SampleSet& s, const BaselineConfig& cfg) {
  check_inputs(s, cfg, 2);
  return fit_with_restarts(s.data(), PriorStep{}, cfg, false, kmeans_attempt);
}

MixtureState gmm_fit(const SampleSet& s, const BaselineConfig& cfg) {
  check_inputs(s, cfg, std::max<Eigen::Index>(2, 2 * s.dim()));
  return fit_with_restarts(s.data(), PriorStep{}, cfg, true, gmm_attempt);
}

std::vector<Label> kmeans_predict(const MixtureState& m, const SampleSet& s) {
  if (m.means.size() != 2 || m.means[0].size() != s.dim()) {
    raise(ErrorCode::DimensionMismatch, "kmeans_predict");
  }
  return to_labels(nearest(s.data(), m.means));
}

std::vector<Label> gmm_predict(const MixtureState& m, const SampleSet& s) {
  if (m.means.size() != 2 || m.covariances.size() != 2 || m.means[0].size() != s.dim()) {
    raise(ErrorCode::DimensionMismatch, "gmm_predict");
  }
  Component comp[2];
  for (int k = 0; k < 2; ++k) {
    if (!factor(m.covariances[k], m.weights[k], comp[k])) {
      raise(ErrorCode::CovarianceCollapse, "stored GMM covariance is singular");
    }
  }
  const Matrix ld = log_densities(s.data(), m, comp);
  std::vector<int> a(static_cast<std::size_t>(s.size()));
  for (Eigen::Index i = 0; i < s.size(); ++i) a[i] = ld(i, 1) > ld(i, 0) ? 1 : 0;
  return to_labels(a);
}

}  // namespace milda
