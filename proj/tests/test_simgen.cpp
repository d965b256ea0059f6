#include <doctest.h>

#include <cmath>

#include "milda/estimators.hpp"
#include "milda/rng.hpp"
#include "milda/simgen.hpp"
#include "oracles.hpp"

using namespace milda;

namespace {

Matrix rows_of(const LabeledSampleSet& ls, Label l) {
  Matrix out(ls.count(l), ls.dim());
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < ls.size(); ++i)
    if (ls.labels()[i] == l) out.row(k++) = ls.samples().data().row(i);
  return out;
}

ChangeSchedule short_schedule() {
  ChangeSchedule s;
  s.total = 4000;
  s.sudden_cov_at = 1000;
  s.drift_begin = 2000;
  s.drift_end = 3000;
  s.sudden_steer_at = 3000;
  return s;
}

}  // namespace

TEST_CASE("rng streams") {
  Rng a(5), b(5), c(6);
  for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());
  CHECK(a.next_u64() != c.next_u64());
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));

  Rng r(7);
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.02);
  for (int i = 0; i < 1000; ++i) {
    CHECK(r.below(7) < 7);
    const double u = r.uniform();
    CHECK((u >= 0.0 && u < 1.0));
  }
}

TEST_CASE("ablation covariances") {
  CHECK(ablation_sigma_plus(4, 0.0).isApprox(Matrix::Identity(4, 4)));
  const Matrix sp = ablation_sigma_plus(6, 0.3);
  CHECK((sp - (0.7 * Matrix::Identity(6, 6) + 0.3 * Matrix::Ones(6, 6))).cwiseAbs().maxCoeff() < 1e-14);

  const Matrix v = ablation_eigenbasis(6);
  CHECK((v.transpose() * v - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((v.col(0) - Vector::Ones(6) / std::sqrt(6.0)).norm() < 1e-12);

  // Same spectrum, different pairing: the ones direction loses the top eigenvalue.
  const Matrix sm = ablation_sigma_minus_default(6, 0.3);
  Eigen::SelfAdjointEigenSolver<Matrix> ep(sp), em(sm);
  CHECK((ep.eigenvalues() - em.eigenvalues()).cwiseAbs().maxCoeff() < 1e-12);
  const Vector ones = Vector::Ones(6) / std::sqrt(6.0);
  CHECK(ones.dot(sp * ones) == doctest::Approx(0.7 + 0.3 * 6));
  CHECK(ones.dot(sm * ones) == doctest::Approx(0.7));
  CHECK(ablation_sigma_minus(6, 0.3, 0.0).isApprox(sp));
  CHECK(ablation_sigma_minus(6, 0.3, 1.0).isApprox(sm));
}

TEST_CASE("rank-deficient ablation covariance is emitted") {
  AblationConfig cfg;
  cfg.d = 2;
  cfg.rho = 1.0;
  const Dataset ds = gen_ablation(cfg);
  CHECK(ds.truth.sigma_plus.isApprox(Matrix::Ones(2, 2)));
  CHECK(ds.data.samples().data().allFinite());
  try {
    PriorKnowledge p(KnownScaledClassCovariances{ds.truth.sigma_plus, ds.truth.sigma_minus, 0.5});
    FAIL("expected NotPositiveDefinite");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPositiveDefinite);
  }
  CHECK_THROWS_AS(inv_sqrt_spd(ds.truth.sigma_plus), Error);
}

TEST_CASE("ablation sample moments converge") {
  double total = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    AblationConfig cfg;
    cfg.seed = seed;
    const Dataset ds = gen_ablation(cfg);
    const double err = (oracle::mean(rows_of(ds.data, Label::Plus)) - ds.truth.mu_plus).norm();
    if (seed == 1) CHECK(err < 0.2);
    total += err;
  }
  CHECK(total / 20 < 0.2);

  AblationConfig big;
  big.n = 40000;
  const Dataset ds = gen_ablation(big);
  CHECK((oracle::covariance(rows_of(ds.data, Label::Minus)) - ds.truth.sigma_minus).cwiseAbs().maxCoeff() < 0.1);
}

TEST_CASE("ablation class counts follow q") {
  AblationConfig cfg;
  cfg.q = 0.3;
  const Dataset ds = gen_ablation(cfg);
  CHECK(ds.data.count(Label::Plus) == 300);
  CHECK(ds.truth.q == doctest::Approx(0.3));
  cfg.q = 1.2;
  CHECK_THROWS_AS(gen_ablation(cfg), Error);
}

TEST_CASE("generators are deterministic") {
  AblationConfig a;
  a.seed = 3;
  CHECK(gen_ablation(a).data.samples().data() == gen_ablation(a).data.samples().data());
  SensorConfig s;
  s.seed = 3;
  CHECK(gen_sensor(s).data.samples().data() == gen_sensor(s).data.samples().data());
  const ChangeSchedule sch = short_schedule();
  CHECK(gen_nonstationary(sch, 4, 3).data.samples().data() ==
        gen_nonstationary(sch, 4, 3).data.samples().data());
}

TEST_CASE("zero-mean noise class has mean near zero") {
  double total = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SensorConfig cfg;
    cfg.seed = seed;
    const SensorDataset ds = gen_sensor(cfg);
    CHECK(ds.data.count(Label::Plus) == 500);
    total += oracle::mean(rows_of(ds.data, Label::Plus)).norm();
    CHECK(ds.truth.mu_plus.isZero());
    CHECK(ds.prior.kind() == PriorKind::ClassMean);
  }
  CHECK(total / 20 < 0.2);
}

TEST_CASE("binary signal difference equals the steering vector") {
  SensorConfig cfg;
  cfg.problem = SensorProblem::BinarySignal;
  const SensorDataset ds = gen_sensor(cfg);
  CHECK((ds.truth.mean_difference() - ds.steering).norm() < 1e-14);
  CHECK(ds.prior.kind() == PriorKind::DifferenceDirection);
  CHECK((ds.steering.array().abs() <= 1.0).all());
}

TEST_CASE("sensor noise covariance") {
  SensorConfig cfg;
  cfg.problem = SensorProblem::KnownNoiseCovariance;
  cfg.d = 4;
  cfg.n = 200000;
  const SensorDataset ds = gen_sensor(cfg);
  const NoiseParams& np = ds.noise;
  Matrix expect = 0.3 * Matrix(np.sigma.asDiagonal()) + 0.7 * Matrix::Ones(4, 4);
  expect.diagonal() += (np.alpha.array().square() / 2).matrix();
  CHECK((np.covariance() - expect).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(ds.truth.sigma_plus.isApprox(expect));
  CHECK(ds.prior.kind() == PriorKind::SharedCovarianceShape);
  CHECK(ds.steering_minus.size() == 4);

  // The sampled noise of one run: Gaussian part plus the time average of the
  // interference, whose channels share one frequency and so are correlated
  // through their phase differences.
  Matrix gauss = 0.3 * Matrix(np.sigma.asDiagonal()) + 0.7 * Matrix::Ones(4, 4);
  Matrix interf(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) interf(i, j) = 0.5 * np.alpha(i) * np.alpha(j) * std::cos(np.phi(i) - np.phi(j));
  const Matrix xp = rows_of(ds.data, Label::Plus);
  CHECK((oracle::covariance(xp) - (gauss + interf)).cwiseAbs().maxCoeff() < 0.03);
  CHECK((np.interference(0) - (np.alpha.array() * np.phi.array().sin()).matrix()).norm() < 1e-14);
}

TEST_CASE("change schedule") {
  ChangeSchedule s;
  CHECK_NOTHROW(s.validate());
  CHECK(s.epoch(0) == 0);
  CHECK(s.epoch(2499) == 0);
  CHECK(s.epoch(2500) == 1);
  CHECK(s.epoch(5000) == 2);
  CHECK(s.epoch(7500) == 3);
  ChangeSchedule bad = s;
  bad.drift_begin = 2000;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("stream parameter timeline matches an independent recomputation") {
  const ChangeSchedule sch;
  const StreamGenerator gen(sch, 10, 1);
  const StreamAnchors& an = gen.anchors();

  for (std::int64_t t = 0; t < sch.total; t += 7) {
    Vector a;
    Vector sigma;
    if (t < 2500) {
      a = an.a1, sigma = an.noise1.sigma;
    } else if (t < 5000) {
      a = an.a1, sigma = an.noise2.sigma;
    } else if (t < 7500) {
      const double u = (t - 5000) / 2500.0;
      Vector mid(10);
      for (int i = 0; i < 10; ++i) mid(i) = an.a1(i) + u * (an.a2(i) - an.a1(i));
      a = mid / mid.norm() * (an.a1.norm() + u * (an.a2.norm() - an.a1.norm()));
      sigma = an.noise2.sigma + u * (an.noise3.sigma - an.noise2.sigma);
    } else {
      a = an.a3, sigma = an.noise3.sigma;
    }
    const StreamState st = stream_state(sch, an, t);
    CHECK((st.steering - a).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((st.noise.sigma - sigma).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((gen.truth(t).mu_minus - a).cwiseAbs().maxCoeff() < 1e-12);
  }

  // Before the first change the statistics are the initial draw exactly.
  CHECK(stream_state(sch, an, 2499).noise.phi == an.noise1.phi);
  CHECK(stream_state(sch, an, 2499).steering == an.a1);

  // Drift midpoint: normalized interpolation direction, mean of the norms.
  const Vector mid = stream_state(sch, an, 6250).steering;
  CHECK(mid.norm() == doctest::Approx((an.a1.norm() + an.a2.norm()) / 2).epsilon(1e-12));
  CHECK(oracle::sine_angle_deg(mid, an.a1 + an.a2) < 1e-8);
}

TEST_CASE("stream samples") {
  const ChangeSchedule sch = short_schedule();
  const StreamDump dump = gen_nonstationary(sch, 5, 2);
  CHECK(dump.data.size() == 4000);
  CHECK(dump.epochs[1600] == 1);
  CHECK(dump.epochs[2600] == 2);
  CHECK(dump.epochs[3000] == 3);
  const double frac = static_cast<double>(dump.data.count(Label::Plus)) / 4000.0;
  CHECK(std::abs(frac - 0.5) < 0.05);

  // Counter-based: a generator advanced to t emits the same sample as the dump.
  StreamGenerator gen(sch, 5, 2);
  for (int i = 0; i < 100; ++i) gen.next();
  const StreamSample s = gen.next();
  CHECK((s.x - dump.data.samples().data().row(100).transpose()).norm() == 0.0);
  CHECK(s.label == dump.data.labels()[100]);
}
