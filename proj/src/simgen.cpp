#include "milda/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "milda/rng.hpp"

namespace milda {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) raise(ErrorCode::ConfigError, what);
}

Vector unit(Eigen::Index d, Eigen::Index i, double v) {
  Vector e = Vector::Zero(d);
  e(i) = v;
  return e;
}

Vector ablation_eigenvalues_plus(Eigen::Index d, double rho) {
  Vector ev = Vector::Constant(d, 1.0 - rho);
  ev(0) = 1.0 + static_cast<double>(d - 1) * rho;
  return ev;
}

Vector ablation_eigenvalues_minus(Eigen::Index d, double rho, double sigma_blend) {
  const Vector plus = ablation_eigenvalues_plus(d, rho);
  Vector shifted(d);
  for (Eigen::Index i = 0; i < d; ++i) shifted(i) = plus((i + 1) % d);
  return (1.0 - sigma_blend) * plus + sigma_blend * shifted;
}

Matrix from_eigen(const Matrix& v, const Vector& ev) {
  return symmetrize(v * ev.asDiagonal() * v.transpose());
}

template <typename T>
void shuffle(std::vector<T>& xs, Rng& rng) {
  for (std::size_t i = xs.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(xs[i - 1], xs[j]);
  }
}

NoiseParams draw_noise(Rng& rng, Eigen::Index d) {
  NoiseParams p;
  p.sigma = rng.uniform_vector(d, 0.0, 1.0);
  p.alpha = rng.uniform_vector(d, 0.0, 1.0);
  p.phi = rng.uniform_vector(d, 0.0, 2.0 * M_PI);
  return p;
}

// g ~ N(0, 0.3 diag(sigma) + 0.7 J) as independent per-channel terms plus one
// shared term.
Vector gaussian_noise(Rng& rng, const Vector& sigma) {
  const Eigen::Index d = sigma.size();
  const double shared = std::sqrt(0.7) * rng.normal();
  Vector g(d);
  for (Eigen::Index i = 0; i < d; ++i) g(i) = std::sqrt(0.3 * sigma(i)) * rng.normal() + shared;
  return g;
}

NoiseParams lerp(const NoiseParams& a, const NoiseParams& b, double u) {
  return NoiseParams{(1.0 - u) * a.sigma + u * b.sigma, (1.0 - u) * a.alpha + u * b.alpha,
                     (1.0 - u) * a.phi + u * b.phi};
}

}  // namespace

// --- ablation -------------------------------------------------------------------

void AblationConfig::validate() const {
  require(n >= 2, "ablation n must be at least 2");
  require(d >= 1, "ablation d must be positive");
  require(rho >= 0.0 && rho <= 1.0, "rho must lie in [0, 1]");
  require(sigma_blend >= 0.0 && sigma_blend <= 1.0, "sigma_blend must lie in [0, 1]");
  require(q > 0.0 && q < 1.0, "q must lie in (0, 1)");
  require(mu_plus.size() == 0 || mu_plus.size() == d, "mu_plus dimension");
  require(mu_minus.size() == 0 || mu_minus.size() == d, "mu_minus dimension");
  const auto n_plus = static_cast<Eigen::Index>(std::llround(q * static_cast<double>(n)));
  require(n_plus >= 1 && n_plus <= n - 1, "q * n must leave both classes non-empty");
}

Vector AblationConfig::resolved_mu_plus() const {
  return mu_plus.size() ? mu_plus : unit(d, 0, 1.0);
}

Vector AblationConfig::resolved_mu_minus() const {
  return mu_minus.size() ? mu_minus : unit(d, 0, -1.0);
}

Matrix ablation_eigenbasis(Eigen::Index d) {
  Matrix v = Matrix::Zero(d, d);
  v.col(0).setConstant(1.0 / std::sqrt(static_cast<double>(d)));
  for (Eigen::Index k = 1; k < d; ++k) {
    const double kk = static_cast<double>(k);
    const double norm = std::sqrt(kk * (kk + 1.0));
    for (Eigen::Index j = 0; j < k; ++j) v(j, k) = 1.0 / norm;
    v(k, k) = -kk / norm;
  }
  return v;
}

Matrix ablation_sigma_plus(Eigen::Index d, double rho) {
  return (1.0 - rho) * Matrix::Identity(d, d) + rho * Matrix::Ones(d, d);
}

Matrix ablation_sigma_minus_default(Eigen::Index d, double rho) {
  return ablation_sigma_minus(d, rho, 1.0);
}

Matrix ablation_sigma_minus(Eigen::Index d, double rho, double sigma_blend) {
  return from_eigen(ablation_eigenbasis(d), ablation_eigenvalues_minus(d, rho, sigma_blend));
}

Dataset gen_ablation(const AblationConfig& cfg) {
  cfg.validate();
  const Eigen::Index d = cfg.d;
  const Matrix v = ablation_eigenbasis(d);
  const Vector ev_plus = ablation_eigenvalues_plus(d, cfg.rho);
  const Vector ev_minus = ablation_eigenvalues_minus(d, cfg.rho, cfg.sigma_blend);
  const Matrix root_plus = v * ev_plus.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  const Matrix root_minus = v * ev_minus.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  const Vector mp = cfg.resolved_mu_plus();
  const Vector mm = cfg.resolved_mu_minus();

  const auto n_plus = static_cast<Eigen::Index>(std::llround(cfg.q * static_cast<double>(cfg.n)));
  std::vector<Label> labels(static_cast<std::size_t>(cfg.n), Label::Minus);
  std::fill(labels.begin(), labels.begin() + n_plus, Label::Plus);
  Rng rng(cfg.seed);
  shuffle(labels, rng);

  Matrix x(cfg.n, d);
  for (Eigen::Index i = 0; i < cfg.n; ++i) {
    const Vector z = rng.normal_vector(d);
    const bool plus = labels[i] == Label::Plus;
    x.row(i) = (plus ? Vector(mp + root_plus * z) : Vector(mm + root_minus * z)).transpose();
  }
  ClassStats truth = ClassStats::make(mp, mm, from_eigen(v, ev_plus), from_eigen(v, ev_minus),
                                      static_cast<double>(n_plus) / static_cast<double>(cfg.n));
  return Dataset{LabeledSampleSet(SampleSet(std::move(x)), std::move(labels)), std::move(truth)};
}

// --- sensor array ---------------------------------------------------------------

std::string_view to_string(SensorProblem p) noexcept {
  switch (p) {
    case SensorProblem::ZeroMeanNoise: return "zero_mean_noise";
    case SensorProblem::BinarySignal: return "binary_signal";
    case SensorProblem::KnownNoiseCovariance: return "noise_covariance";
  }
  return "unknown";
}

SensorProblem sensor_problem_from_string(std::string_view name) {
  for (auto p : {SensorProblem::ZeroMeanNoise, SensorProblem::BinarySignal,
                 SensorProblem::KnownNoiseCovariance}) {
    if (name == to_string(p)) return p;
  }
  raise(ErrorCode::ConfigError, "unknown sensor problem '" + std::string(name) + "'");
}

void SensorConfig::validate() const {
  require(d >= 1, "sensor d must be positive");
  require(n >= 2 && n % 2 == 0, "sensor n must be even and at least 2");
}

Matrix NoiseParams::covariance() const {
  const Eigen::Index d = sigma.size();
  Matrix c = 0.7 * Matrix::Ones(d, d);
  c.diagonal() += 0.3 * sigma + 0.5 * alpha.cwiseAbs2();
  return c;
}

Vector NoiseParams::interference(std::int64_t t) const {
  const double base = 0.5 * M_PI * static_cast<double>(t);
  Vector f(alpha.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = alpha(i) * std::sin(base + phi(i));
  return f;
}

SensorDataset gen_sensor(const SensorConfig& cfg) {
  cfg.validate();
  const Eigen::Index d = cfg.d;
  Rng rng(cfg.seed);
  const Vector a1 = rng.uniform_vector(d, -1.0, 1.0);
  const Vector a2 = rng.uniform_vector(d, -1.0, 1.0);
  const NoiseParams noise = draw_noise(rng, d);

  std::vector<Label> labels(static_cast<std::size_t>(cfg.n), Label::Minus);
  std::fill(labels.begin(), labels.begin() + cfg.n / 2, Label::Plus);
  shuffle(labels, rng);

  Vector mu_plus, mu_minus;
  switch (cfg.problem) {
    case SensorProblem::ZeroMeanNoise:
      mu_plus = Vector::Zero(d);
      mu_minus = a1;
      break;
    case SensorProblem::BinarySignal:
      mu_plus = 0.5 * a1;
      mu_minus = -0.5 * a1;
      break;
    case SensorProblem::KnownNoiseCovariance:
      mu_plus = a1;
      mu_minus = a2;
      break;
  }

  Matrix x(cfg.n, d);
  for (Eigen::Index t = 0; t < cfg.n; ++t) {
    const Vector& signal = labels[t] == Label::Plus ? mu_plus : mu_minus;
    x.row(t) = (signal + gaussian_noise(rng, noise.sigma) + noise.interference(t)).transpose();
  }

  const Matrix cov = noise.covariance();
  ClassStats truth = ClassStats::make(mu_plus, mu_minus, cov, cov, 0.5);
  PriorKnowledge prior = [&]() -> PriorKnowledge {
    switch (cfg.problem) {
      case SensorProblem::ZeroMeanNoise: return KnownClassMean{Vector::Zero(d)};
      case SensorProblem::BinarySignal: return KnownDifferenceDirection{a1};
      case SensorProblem::KnownNoiseCovariance: return KnownSharedCovarianceShape{cov};
    }
    raise(ErrorCode::ConfigError, "unknown sensor problem");
  }();
  return SensorDataset{LabeledSampleSet(SampleSet(std::move(x)), std::move(labels)),
                       std::move(prior),
                       std::move(truth),
                       a1,
                       cfg.problem == SensorProblem::KnownNoiseCovariance ? a2 : Vector(),
                       noise};
}

// --- non-stationary stream ------------------------------------------------------

void ChangeSchedule::validate() const {
  require(0 < sudden_cov_at && sudden_cov_at < drift_begin && drift_begin < drift_end &&
              drift_end <= sudden_steer_at && sudden_steer_at < total,
          "change schedule indices must increase within the stream length");
}

int ChangeSchedule::epoch(std::int64_t t) const {
  if (t < sudden_cov_at) return 0;
  if (t < drift_begin) return 1;
  if (t < drift_end) return 2;
  return 3;
}

StreamAnchors draw_stream_anchors(Eigen::Index d, std::uint64_t seed) {
  Rng rng(seed);
  StreamAnchors an;
  an.a1 = rng.uniform_vector(d, -1.0, 1.0);
  an.a2 = rng.uniform_vector(d, -1.0, 1.0);
  an.a3 = rng.uniform_vector(d, -1.0, 1.0);
  an.noise1 = draw_noise(rng, d);
  an.noise2 = draw_noise(rng, d);
  an.noise3 = draw_noise(rng, d);
  return an;
}

StreamState stream_state(const ChangeSchedule& sch, const StreamAnchors& an, std::int64_t t) {
  if (t < sch.sudden_cov_at) return {an.a1, an.noise1};
  if (t < sch.drift_begin) return {an.a1, an.noise2};
  if (t < sch.drift_end) {
    const double u = static_cast<double>(t - sch.drift_begin) /
                     static_cast<double>(sch.drift_end - sch.drift_begin);
    const Vector path = (1.0 - u) * an.a1 + u * an.a2;
    const double norm = (1.0 - u) * an.a1.norm() + u * an.a2.norm();
    const double pn = path.norm();
    return {pn > 0.0 ? Vector(path * (norm / pn)) : path, lerp(an.noise2, an.noise3, u)};
  }
  if (t < sch.sudden_steer_at) return {an.a2, an.noise3};
  return {an.a3, an.noise3};
}

StreamGenerator::StreamGenerator(ChangeSchedule schedule, Eigen::Index d, std::uint64_t seed)
    : schedule_(schedule),
      d_(d),
      anchors_(draw_stream_anchors(d, derive_seed(seed, {0}))),
      sample_seed_(derive_seed(seed, {1})) {
  schedule_.validate();
  require(d >= 1, "stream d must be positive");
}

StreamSample StreamGenerator::next() {
  if (done()) raise(ErrorCode::InvalidArgument, "stream exhausted");
  const std::int64_t t = t_++;
  const StreamState st = stream_state(schedule_, anchors_, t);
  Rng rng(derive_seed(sample_seed_, {static_cast<std::uint64_t>(t)}));
  const Label label = rng.uniform() < 0.5 ? Label::Plus : Label::Minus;
  Vector x = gaussian_noise(rng, st.noise.sigma) + st.noise.interference(t);
  if (label == Label::Minus) x += st.steering;
  return StreamSample{std::move(x), label, schedule_.epoch(t)};
}

ClassStats StreamGenerator::truth(std::int64_t t) const {
  const StreamState st = stream_state(schedule_, anchors_, t);
  const Matrix cov = st.noise.covariance();
  return ClassStats::make(Vector::Zero(d_), st.steering, cov, cov, 0.5);
}

StreamDump gen_nonstationary(const ChangeSchedule& sch, Eigen::Index d, std::uint64_t seed) {
  StreamGenerator gen(sch, d, seed);
  Matrix x(sch.total, d);
  std::vector<Label> labels;
  std::vector<int> epochs;
  labels.reserve(static_cast<std::size_t>(sch.total));
  epochs.reserve(static_cast<std::size_t>(sch.total));
  while (!gen.done()) {
    const auto t = gen.index();
    StreamSample s = gen.next();
    x.row(t) = s.x.transpose();
    labels.push_back(s.label);
    epochs.push_back(s.epoch);
  }
  return StreamDump{LabeledSampleSet(SampleSet(std::move(x)), std::move(labels)),
                    std::move(epochs)};
}

}  // namespace milda
