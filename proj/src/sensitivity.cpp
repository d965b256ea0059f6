#include "milda/sensitivity.hpp"

#include <cmath>
#include <ostream>

#include "milda/csv_io.hpp"
#include "milda/estimators.hpp"
#include "milda/lda.hpp"

namespace milda {

Vector exact_milda_direction(const ClassStats& cs) {
  const GlobalStats g = implied_global_stats(cs);
  const double scale = std::sqrt(std::max(g.cov.trace(), 0.0));
  if (!(g.mean.norm() > 1e-12 * scale)) {
    raise(ErrorCode::DegenerateMean, "global mean vanishes");
  }
  return solve_spd(g.cov, g.mean);
}

SensitivityReport decompose_error(const ClassStats& cs) {
  const Vector md = cs.mean_difference();
  if (!(md.norm() > 0.0)) raise(ErrorCode::CoincidentMeans, "class means coincide");
  const Matrix sh = cs.weighted_scatter();
  const Vector mbar = cs.q * cs.mu_plus + (1.0 - cs.q) * cs.mu_minus;

  SensitivityReport r;
  r.delta = md.dot(mbar) / md.squaredNorm();
  r.e = mbar - r.delta * md;
  const double qq = cs.q * (1.0 - cs.q);
  const Vector sh_inv_md = solve_spd(sh, md);
  r.phi = -qq * sh_inv_md.dot(mbar) / (1.0 + qq * sh_inv_md.dot(md));
  r.angle_deg = folded_angle_deg(exact_milda_direction(cs), sh_inv_md);
  return r;
}

Vector reconstructed_direction(const ClassStats& cs, const SensitivityReport& r) {
  return solve_spd(cs.weighted_scatter(), (r.phi + r.delta) * cs.mean_difference() + r.e);
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 2) raise(ErrorCode::ConfigError, "grid needs at least two points per axis");
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

HeatmapGrid angle_heatmap(const Vector& mu_plus, const std::vector<double>& xs,
                          const std::vector<double>& ys, const Matrix& sigma_hat, double q) {
  if (mu_plus.size() != 2 || sigma_hat.rows() != 2 || sigma_hat.cols() != 2) {
    raise(ErrorCode::DimensionMismatch, "heatmap works in two dimensions");
  }
  if (xs.size() < 2 || ys.size() < 2) {
    raise(ErrorCode::ConfigError, "grid needs at least two points per axis");
  }
  HeatmapGrid g{xs, ys, {}};
  g.angles.assign(ys.size(), std::vector<std::optional<double>>(xs.size()));
  for (std::size_t r = 0; r < ys.size(); ++r) {
    for (std::size_t c = 0; c < xs.size(); ++c) {
      Vector mu_minus(2);
      mu_minus << xs[c], ys[r];
      try {
        const ClassStats cs = ClassStats::make(mu_plus, mu_minus, sigma_hat, sigma_hat, q);
        g.angles[r][c] = folded_angle_deg(exact_milda_direction(cs), fisher_direction(cs));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::CoincidentMeans && e.code() != ErrorCode::DegenerateMean) throw;
      }
    }
  }
  return g;
}

void write_heatmap_csv(std::ostream& out, const HeatmapGrid& g,
                       const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "y\\x";
  for (double x : g.xs) out << ',' << format_double(x);
  out << '\n';
  for (std::size_t r = 0; r < g.ys.size(); ++r) {
    out << format_double(g.ys[r]);
    for (const auto& cell : g.angles[r]) {
      out << ',';
      if (cell) out << format_double(*cell);
    }
    out << '\n';
  }
}

}  // namespace milda
