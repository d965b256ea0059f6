#include "milda/model.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace milda {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SingleClassOnly: return "SingleClassOnly";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::SingularUpdate: return "SingularUpdate";
    case ErrorCode::SingularScatter: return "SingularScatter";
    case ErrorCode::CoincidentMeans: return "CoincidentMeans";
    case ErrorCode::DegenerateMean: return "DegenerateMean";
    case ErrorCode::ZeroDirection: return "ZeroDirection";
    case ErrorCode::EmptyCluster: return "EmptyCluster";
    case ErrorCode::CovarianceCollapse: return "CovarianceCollapse";
    case ErrorCode::InsufficientWindow: return "InsufficientWindow";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

bool is_numerical(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotPositiveDefinite:
    case ErrorCode::DegenerateSpectrum:
    case ErrorCode::SingularUpdate:
    case ErrorCode::SingularScatter:
    case ErrorCode::CoincidentMeans:
    case ErrorCode::DegenerateMean:
    case ErrorCode::ZeroDirection:
    case ErrorCode::EmptyCluster:
    case ErrorCode::CovarianceCollapse:
    case ErrorCode::InsufficientWindow:
      return true;
    default:
      return false;
  }
}

std::optional<ErrorCode> check(const Matrix& data) noexcept {
  if (data.rows() == 0 || data.cols() == 0) return ErrorCode::EmptySet;
  if (!data.allFinite()) return ErrorCode::NonFiniteEntry;
  return std::nullopt;
}

void validate(const Matrix& data) {
  if (auto code = check(data)) {
    raise(*code, "sample matrix is " + std::to_string(data.rows()) + "x" +
                     std::to_string(data.cols()));
  }
}

SampleSet::SampleSet(Matrix data) : data_(std::move(data)) { validate(data_); }

Label label_from_int(long v) {
  if (v == 1) return Label::Plus;
  if (v == -1) return Label::Minus;
  raise(ErrorCode::InvalidArgument,
        "class label must be -1 or +1, got " + std::to_string(v));
}

LabeledSampleSet::LabeledSampleSet(SampleSet samples, std::vector<Label> labels)
    : samples_(std::move(samples)), labels_(std::move(labels)) {
  if (static_cast<Eigen::Index>(labels_.size()) != samples_.size()) {
    raise(ErrorCode::DimensionMismatch,
          "label count " + std::to_string(labels_.size()) +
              " does not match sample count " +
              std::to_string(samples_.size()));
  }
}

Eigen::Index LabeledSampleSet::count(Label l) const noexcept {
  return std::count(labels_.begin(), labels_.end(), l);
}

bool is_symmetric(const Matrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

namespace {

void require_square(const Matrix& m, Eigen::Index dim, const char* name) {
  if (m.rows() != dim || m.cols() != dim) {
    raise(ErrorCode::DimensionMismatch,
          std::string(name) + " must be " + std::to_string(dim) + "x" +
              std::to_string(dim));
  }
  if (!m.allFinite()) raise(ErrorCode::NonFiniteEntry, name);
}

void require_symmetric(const Matrix& m, const char* name) {
  if (!is_symmetric(m)) {
    raise(ErrorCode::InvalidArgument, std::string(name) + " is not symmetric");
  }
}

void require_spd(const Matrix& m, const char* name) {
  require_symmetric(m, name);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(m),
                                            Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success || !(eig.eigenvalues()(0) > 0.0)) {
    raise(ErrorCode::NotPositiveDefinite,
          std::string(name) + " is not positive definite");
  }
}

}  // namespace

ClassStats ClassStats::make(Vector mu_plus, Vector mu_minus, Matrix sigma_plus,
                            Matrix sigma_minus, double q) {
  const Eigen::Index dim = mu_plus.size();
  if (dim == 0) raise(ErrorCode::EmptySet, "class means are empty");
  if (mu_minus.size() != dim) {
    raise(ErrorCode::DimensionMismatch, "class means differ in length");
  }
  if (!mu_plus.allFinite() || !mu_minus.allFinite()) {
    raise(ErrorCode::NonFiniteEntry, "class mean");
  }
  require_square(sigma_plus, dim, "sigma_plus");
  require_square(sigma_minus, dim, "sigma_minus");
  require_symmetric(sigma_plus, "sigma_plus");
  require_symmetric(sigma_minus, "sigma_minus");
  if (!(q > 0.0 && q < 1.0)) {
    raise(ErrorCode::InvalidArgument, "q must lie strictly inside (0,1)");
  }
  return ClassStats{std::move(mu_plus), std::move(mu_minus),
                    symmetrize(sigma_plus), symmetrize(sigma_minus), q};
}

Matrix ClassStats::weighted_scatter() const {
  return symmetrize(q * sigma_plus + (1.0 - q) * sigma_minus);
}

GlobalStats GlobalStats::make(Vector mean, Matrix cov) {
  if (mean.size() == 0) raise(ErrorCode::EmptySet, "global mean is empty");
  require_square(cov, mean.size(), "cov_bar");
  require_symmetric(cov, "cov_bar");
  return GlobalStats{std::move(mean), symmetrize(cov)};
}

GlobalStats implied_global_stats(const ClassStats& cs) {
  const Vector diff = cs.mean_difference();
  Vector mean = cs.q * cs.mu_plus + (1.0 - cs.q) * cs.mu_minus;
  Matrix cov = cs.weighted_scatter() +
               cs.q * (1.0 - cs.q) * diff * diff.transpose();
  return GlobalStats{std::move(mean), symmetrize(cov)};
}

std::string_view to_string(PriorKind kind) noexcept {
  switch (kind) {
    case PriorKind::ClassMean: return "class_mean";
    case PriorKind::DifferenceDirection: return "difference_direction";
    case PriorKind::ScaledClassCovariances: return "scaled_class_covariances";
    case PriorKind::SharedCovarianceShape: return "shared_covariance_shape";
  }
  return "unknown";
}

PriorKind prior_kind_from_string(std::string_view name) {
  for (auto k : {PriorKind::ClassMean, PriorKind::DifferenceDirection,
                 PriorKind::ScaledClassCovariances,
                 PriorKind::SharedCovarianceShape}) {
    if (to_string(k) == name) return k;
  }
  raise(ErrorCode::ParseError, "unknown prior kind '" + std::string(name) + "'");
}

PriorKnowledge::PriorKnowledge(KnownClassMean p) : value_(std::move(p)) {
  const auto& mu = std::get<KnownClassMean>(value_).mu_plus;
  if (mu.size() == 0) raise(ErrorCode::EmptySet, "known class mean is empty");
  if (!mu.allFinite()) raise(ErrorCode::NonFiniteEntry, "known class mean");
}

PriorKnowledge::PriorKnowledge(KnownDifferenceDirection p)
    : value_(std::move(p)) {
  const auto& d = std::get<KnownDifferenceDirection>(value_).d;
  if (d.size() == 0) raise(ErrorCode::EmptySet, "difference direction is empty");
  if (!d.allFinite()) raise(ErrorCode::NonFiniteEntry, "difference direction");
  if (!(d.norm() > 0.0)) {
    raise(ErrorCode::ZeroDirection, "difference direction has zero norm");
  }
}

PriorKnowledge::PriorKnowledge(KnownScaledClassCovariances p)
    : value_(std::move(p)) {
  auto& v = std::get<KnownScaledClassCovariances>(value_);
  const Eigen::Index dim = v.s_plus.rows();
  if (dim == 0) raise(ErrorCode::EmptySet, "class covariance is empty");
  require_square(v.s_plus, dim, "s_plus");
  require_square(v.s_minus, dim, "s_minus");
  require_spd(v.s_plus, "s_plus");
  require_spd(v.s_minus, "s_minus");
  if (!(v.q > 0.0 && v.q < 1.0)) {
    raise(ErrorCode::InvalidArgument, "q must lie strictly inside (0,1)");
  }
  v.s_plus = symmetrize(v.s_plus);
  v.s_minus = symmetrize(v.s_minus);
}

PriorKnowledge::PriorKnowledge(KnownSharedCovarianceShape p)
    : value_(std::move(p)) {
  auto& v = std::get<KnownSharedCovarianceShape>(value_);
  if (v.s.rows() == 0) raise(ErrorCode::EmptySet, "covariance shape is empty");
  require_square(v.s, v.s.rows(), "s");
  require_spd(v.s, "s");
  v.s = symmetrize(v.s);
}

PriorKind PriorKnowledge::kind() const noexcept {
  return static_cast<PriorKind>(value_.index());
}

Eigen::Index PriorKnowledge::dim() const noexcept {
  return std::visit(
      [](const auto& p) -> Eigen::Index {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, KnownClassMean>) return p.mu_plus.size();
        else if constexpr (std::is_same_v<T, KnownDifferenceDirection>) return p.d.size();
        else if constexpr (std::is_same_v<T, KnownScaledClassCovariances>) return p.s_plus.rows();
        else return p.s.rows();
      },
      value_);
}

PriorTransform PriorTransform::identity(Eigen::Index dim) {
  PriorTransform t;
  t.shift = Vector::Zero(dim);
  return t;
}

}  // namespace milda
