#pragma once

// Error analysis of the label-free direction under a misaligned mean
// assumption. With mD = mu+ - mu- and the global mean split as
// m = delta mD + e (e orthogonal to mD),
//   inverse(Sigma_bar) m  ~  inverse(Sigma_hat) ((phi + delta) mD + e),
//   phi = -q(1-q) mD^T inverse(Sigma_hat) m / (1 + q(1-q) mD^T inverse(Sigma_hat) mD).

#include <iosfwd>
#include <optional>
#include <vector>

#include "milda/model.hpp"

namespace milda {

struct SensitivityReport {
  double delta = 0.0;
  Vector e;
  double phi = 0.0;
  double angle_deg = 0.0;  // between inverse(Sigma_bar) m and inverse(Sigma_hat) mD, in [0, 90]
};

/// Exact-moment decomposition. Throws CoincidentMeans, SingularScatter, or
/// DegenerateMean when the global mean vanishes.
SensitivityReport decompose_error(const ClassStats& cs);

/// Exact-moment label-free direction inverse(Sigma_bar) m (not normalized).
Vector exact_milda_direction(const ClassStats& cs);

/// inverse(Sigma_hat) ((phi + delta) mD + e)
Vector reconstructed_direction(const ClassStats& cs, const SensitivityReport& r);

struct HeatmapGrid {
  std::vector<double> xs;  // mu- x coordinates (columns)
  std::vector<double> ys;  // mu- y coordinates (rows)
  /// angles[row][col] for mu- = (xs[col], ys[row]); nullopt where
  /// mu- = mu+ or the global mean vanishes.
  std::vector<std::vector<std::optional<double>>> angles;
};

/// Evenly spaced grid from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, int n);

/// Angle between the exact-moment label-free direction and
/// (Sigma+ + Sigma-)^{-1}(mu+ - mu-) with Sigma+ = Sigma- = sigma_hat, for
/// every mu- on the grid. No sampling.
HeatmapGrid angle_heatmap(const Vector& mu_plus, const std::vector<double>& xs,
                          const std::vector<double>& ys, const Matrix& sigma_hat, double q);

/// Header row holds the x values (first cell "y\x"), each following row
/// starts with its y value; missing cells are empty.
void write_heatmap_csv(std::ostream& out, const HeatmapGrid& g,
                       const std::vector<std::string>& comments = {});

}  // namespace milda
