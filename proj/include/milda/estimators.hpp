#pragma once

#include "milda/model.hpp"

namespace milda {

struct EigenPair {
  Vector vector;  // unit norm, first non-zero coordinate positive
  double value = 0.0;
};

Vector global_mean(const SampleSet& s);

/// Biased (1/N) covariance of all rows, symmetrized.
Matrix global_covariance(const SampleSet& s);

GlobalStats global_stats(const SampleSet& s);

/// Per-class biased moments and q = N+/N. Throws SingleClassOnly when either
/// class is empty.
ClassStats class_stats(const LabeledSampleSet& ls);

inline constexpr double kSpdEigenFloor = 1e-12;

/// Symmetric B with B a B = I. Throws NotPositiveDefinite when the smallest
/// eigenvalue does not exceed eps times the largest; there is no clamping.
Matrix inv_sqrt_spd(const Matrix& a, double eps = kSpdEigenFloor);

inline constexpr double kEigengapTolerance = 1e-10;
inline constexpr Eigen::Index kDenseEigenMaxDim = 64;

/// Eigenvector of the algebraically largest eigenvalue. Dense symmetric
/// eigendecomposition up to 64 dimensions, shifted power iteration above.
/// Throws DegenerateSpectrum when the top two eigenvalues are closer than
/// 1e-10 relative to the spectral radius.
EigenPair top_eigenvector(const Matrix& a);

/// Power-iteration route regardless of dimension; exposed for testing.
EigenPair top_eigenvector_power(const Matrix& a, double tol = 1e-12,
                                int max_iters = 10000);

/// (A + gamma u u^T)^{-1} from A^{-1}. Throws SingularUpdate when
/// |1 + gamma u^T A^{-1} u| < 1e-14.
Matrix sherman_morrison_inverse(const Matrix& a_inv, double gamma,
                                const Vector& u);

/// Solves a x = b for symmetric positive definite a. Throws SingularScatter
/// when a is not numerically positive definite.
Vector solve_spd(const Matrix& a, const Vector& b);

/// Angle in degrees between two non-zero vectors, folded into [0, 90].
double folded_angle_deg(const Vector& a, const Vector& b);

}  // namespace milda
