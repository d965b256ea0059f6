#include "milda/estimators.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace milda {

namespace {

Matrix biased_covariance(const Matrix& x, const Vector& mean) {
  const Matrix centered = x.rowwise() - mean.transpose();
  Matrix cov = Matrix::Zero(x.cols(), x.cols());
  cov.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose(), 1.0 / static_cast<double>(x.rows()));
  return cov.selfadjointView<Eigen::Lower>();
}

Matrix rows_with_label(const LabeledSampleSet& ls, Label l) {
  const auto& x = ls.samples().data();
  Matrix out(ls.count(l), x.cols());
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (ls.labels()[i] == l) out.row(k++) = x.row(i);
  }
  return out;
}

void fix_sign(Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-12) {
      if (v(i) < 0.0) v = -v;
      return;
    }
  }
}

void require_symmetric_square(const Matrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    raise(ErrorCode::DimensionMismatch, std::string(what) + " must be square");
  }
  if (!a.allFinite()) raise(ErrorCode::NonFiniteEntry, what);
  if (!is_symmetric(a)) {
    raise(ErrorCode::InvalidArgument, std::string(what) + " must be symmetric");
  }
}

void check_gap(double top, double second, double radius) {
  if (!(radius > 0.0) || top - second < kEigengapTolerance * radius) {
    raise(ErrorCode::DegenerateSpectrum,
          "top two eigenvalues coincide (" + std::to_string(top) + ", " +
              std::to_string(second) + ")");
  }
}

// Power iteration on a PSD matrix; returns false if it did not converge.
bool power_iterate(const Matrix& b, Vector& v, double tol, int max_iters) {
  for (int it = 0; it < max_iters; ++it) {
    Vector next = b * v;
    const double norm = next.norm();
    if (!(norm > 0.0)) return false;
    next /= norm;
    const double change = (next - v).norm();
    v = std::move(next);
    if (change < tol) return true;
  }
  return false;
}

}  // namespace

Vector global_mean(const SampleSet& s) {
  return s.data().colwise().mean().transpose();
}

Matrix global_covariance(const SampleSet& s) {
  return biased_covariance(s.data(), global_mean(s));
}

GlobalStats global_stats(const SampleSet& s) {
  Vector mean = global_mean(s);
  Matrix cov = biased_covariance(s.data(), mean);
  return GlobalStats{std::move(mean), std::move(cov)};
}

ClassStats class_stats(const LabeledSampleSet& ls) {
  const auto n_plus = ls.count(Label::Plus);
  const auto n_minus = ls.count(Label::Minus);
  if (n_plus == 0 || n_minus == 0) {
    raise(ErrorCode::SingleClassOnly,
          "need samples of both classes (N+=" + std::to_string(n_plus) +
              ", N-=" + std::to_string(n_minus) + ")");
  }
  const Matrix xp = rows_with_label(ls, Label::Plus);
  const Matrix xm = rows_with_label(ls, Label::Minus);
  Vector mp = xp.colwise().mean().transpose();
  Vector mm = xm.colwise().mean().transpose();
  Matrix sp = biased_covariance(xp, mp);
  Matrix sm = biased_covariance(xm, mm);
  const double q = static_cast<double>(n_plus) / static_cast<double>(ls.size());
  return ClassStats{std::move(mp), std::move(mm), std::move(sp), std::move(sm), q};
}

Matrix inv_sqrt_spd(const Matrix& a, double eps) {
  require_symmetric_square(a, "inv_sqrt_spd input");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(a));
  if (eig.info() != Eigen::Success) {
    raise(ErrorCode::NotPositiveDefinite, "eigendecomposition failed");
  }
  const Vector& ev = eig.eigenvalues();
  const double largest = ev(ev.size() - 1);
  if (!(largest > 0.0) || !(ev(0) > eps * largest)) {
    raise(ErrorCode::NotPositiveDefinite,
          "smallest eigenvalue " + std::to_string(ev(0)) +
              " is below the floor relative to largest " +
              std::to_string(largest) +
              "; reduce dimensionality before whitening");
  }
  const Matrix& v = eig.eigenvectors();
  const Vector inv_sqrt = ev.array().rsqrt().matrix();
  return symmetrize(v * inv_sqrt.asDiagonal() * v.transpose());
}

EigenPair top_eigenvector_power(const Matrix& a, double tol, int max_iters) {
  require_symmetric_square(a, "top_eigenvector input");
  const Eigen::Index n = a.rows();
  const Matrix sym = symmetrize(a);
  // Gershgorin bound makes the shifted matrix PSD so the algebraically
  // largest eigenvalue dominates.
  const double shift = sym.cwiseAbs().rowwise().sum().maxCoeff();
  if (!(shift > 0.0)) raise(ErrorCode::DegenerateSpectrum, "zero matrix");
  const Matrix b = sym + shift * Matrix::Identity(n, n);

  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = 1.0 + 0.37 * std::sin(1.0 + i);
  v.normalize();
  if (!power_iterate(b, v, tol, max_iters)) {
    raise(ErrorCode::DegenerateSpectrum, "power iteration did not converge");
  }
  const double top = v.dot(sym * v);
  if (n > 1) {
    const Matrix deflated = b - (top + shift) * v * v.transpose();
    Vector u(n);
    for (Eigen::Index i = 0; i < n; ++i) u(i) = 1.0 + 0.29 * std::cos(2.0 + i);
    u -= u.dot(v) * v;
    u.normalize();
    power_iterate(deflated, u, tol, max_iters);
    const double second = u.dot(sym * u);
    check_gap(top, second, std::max(std::abs(top), std::abs(second)));
  }
  fix_sign(v);
  return EigenPair{std::move(v), top};
}

EigenPair top_eigenvector(const Matrix& a) {
  require_symmetric_square(a, "top_eigenvector input");
  if (a.rows() > kDenseEigenMaxDim) return top_eigenvector_power(a);

  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(a));
  if (eig.info() != Eigen::Success) {
    raise(ErrorCode::DegenerateSpectrum, "eigendecomposition failed");
  }
  const Vector& ev = eig.eigenvalues();
  const Eigen::Index n = ev.size();
  if (n > 1) {
    const double radius = std::max(std::abs(ev(0)), std::abs(ev(n - 1)));
    check_gap(ev(n - 1), ev(n - 2), radius);
  }
  Vector v = eig.eigenvectors().col(n - 1).normalized();
  fix_sign(v);
  return EigenPair{std::move(v), ev(n - 1)};
}

Matrix sherman_morrison_inverse(const Matrix& a_inv, double gamma,
                                const Vector& u) {
  if (a_inv.rows() != a_inv.cols() || a_inv.rows() != u.size()) {
    raise(ErrorCode::DimensionMismatch, "sherman_morrison_inverse shapes");
  }
  const Vector left = a_inv * u;                  // A^{-1} u
  const Vector right = a_inv.transpose() * u;     // (u^T A^{-1})^T
  const double denom = 1.0 + gamma * u.dot(left);
  if (std::abs(denom) < 1e-14) {
    raise(ErrorCode::SingularUpdate, "1 + gamma u^T A^{-1} u vanishes");
  }
  return a_inv - (gamma / denom) * left * right.transpose();
}

Vector solve_spd(const Matrix& a, const Vector& b) {
  if (a.rows() != a.cols() || a.rows() != b.size()) {
    raise(ErrorCode::DimensionMismatch, "solve_spd shapes");
  }
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success || !(llt.rcond() > kSpdEigenFloor)) {
    raise(ErrorCode::SingularScatter,
          "scatter matrix is not positive definite; reduce dimensionality first");
  }
  return llt.solve(b);
}

double folded_angle_deg(const Vector& a, const Vector& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0)) {
    raise(ErrorCode::InvalidArgument, "angle of a zero vector");
  }
  // atan2 of the sine and cosine parts keeps precision near 0 and 90 degrees.
  const Vector ua = a / na;
  const Vector ub = b / nb;
  const double c = std::abs(ua.dot(ub));
  const double s = (ub - ua.dot(ub) * ua).norm();
  return std::atan2(s, c) * 180.0 / M_PI;
}

}  // namespace milda
