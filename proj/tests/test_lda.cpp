#include <doctest.h>

#include "milda/estimators.hpp"
#include "milda/lda.hpp"
#include "milda/simgen.hpp"
#include "oracles.hpp"

using namespace milda;

namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

Matrix diag2(double a, double b) { return v2(a, b).asDiagonal(); }

}  // namespace

TEST_CASE("fisher direction on simple statistics") {
  const ClassStats a = ClassStats::make(v2(1, 0), v2(-1, 0), Matrix::Identity(2, 2),
                                        Matrix::Identity(2, 2), 0.5);
  CHECK((fisher_direction(a) - v2(1, 0)).norm() < 1e-14);

  const ClassStats b = ClassStats::make(v2(0, 1), v2(0, -1), diag2(0.5, 2), diag2(0.5, 2), 0.5);
  CHECK((fisher_direction(b) - v2(0, 1)).norm() < 1e-14);
}

TEST_CASE("fisher direction matches a generic solver on sensor statistics") {
  SensorConfig cfg;
  cfg.problem = SensorProblem::BinarySignal;
  cfg.seed = 17;
  const ClassStats cs = gen_sensor(cfg).truth;
  const Vector ref = oracle::lu_solve(cs.sigma_plus + cs.sigma_minus, cs.mu_plus - cs.mu_minus);
  const Vector w = fisher_direction(cs);
  CHECK(oracle::sine_angle_deg(w, ref) < 1e-10);
  CHECK(w.dot(cs.mu_plus - cs.mu_minus) > 0);
  CHECK(w.norm() == doctest::Approx(1.0));
}

TEST_CASE("q-weighted direction") {
  auto g = oracle::engine(21);
  const Vector mp = oracle::random_vector(g, 5), mm = oracle::random_vector(g, 5);
  const Matrix s = oracle::random_spd(g, 5);

  const ClassStats balanced = ClassStats::make(mp, mm, s, oracle::random_spd(g, 5), 0.5);
  CHECK(oracle::sine_angle_deg(qweighted_direction(balanced), fisher_direction(balanced)) < 1e-10);

  const ClassStats prop = ClassStats::make(mp, mm, 2.0 * s, s, 0.83);
  CHECK(oracle::sine_angle_deg(qweighted_direction(prop), fisher_direction(prop)) < 1e-10);

  const Matrix sp = oracle::random_spd(g, 5, 0.1), sm = oracle::random_spd(g, 5, 2.0);
  const ClassStats skew = ClassStats::make(mp, mm, sp, sm, 0.9);
  const Vector ref = oracle::lu_solve(0.9 * sp + 0.1 * sm, mp - mm);
  CHECK(oracle::sine_angle_deg(qweighted_direction(skew), ref) < 1e-10);
  CHECK(qweighted_direction(skew).dot(mp - mm) > 0);
}

TEST_CASE("midpoint threshold") {
  const ClassStats a = ClassStats::make(v2(1, 0), v2(-1, 0), Matrix::Identity(2, 2),
                                        Matrix::Identity(2, 2), 0.5);
  CHECK(lda_threshold(a, v2(1, 0)) == doctest::Approx(0.0));
  const ClassStats b = ClassStats::make(v2(3, 0), v2(1, 0), Matrix::Identity(2, 2),
                                        Matrix::Identity(2, 2), 0.5);
  CHECK(lda_threshold(b, v2(1, 0)) == doctest::Approx(2.0));

  auto g = oracle::engine(2);
  const Vector mp = oracle::random_vector(g, 4), mm = oracle::random_vector(g, 4);
  const ClassStats c = ClassStats::make(mp, mm, oracle::random_spd(g, 4), oracle::random_spd(g, 4), 0.4);
  const Vector w = oracle::random_vector(g, 4);
  double ref = 0;
  for (int i = 0; i < 4; ++i) ref += w(i) * (mp(i) + mm(i)) / 2;
  CHECK(std::abs(lda_threshold(c, w) - ref) < 1e-12);
}

TEST_CASE("lda errors") {
  const ClassStats same = ClassStats::make(v2(1, 1), v2(1, 1), Matrix::Identity(2, 2),
                                           Matrix::Identity(2, 2), 0.5);
  CHECK_THROWS_AS(fisher_direction(same), Error);
  const ClassStats singular = ClassStats::make(v2(1, 0), v2(-1, 0), diag2(1, 0), diag2(1, 0), 0.5);
  try {
    fisher_direction(singular);
    FAIL("expected SingularScatter");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularScatter);
  }
  CHECK_THROWS_AS(ClassStats::make(v2(1, 0), v2(-1, 0), Matrix::Identity(2, 2),
                                   Matrix::Identity(2, 2), 1.0),
                  Error);
}

TEST_CASE("lda model classifies by the midpoint") {
  const ClassStats b = ClassStats::make(v2(3, 0), v2(1, 0), Matrix::Identity(2, 2),
                                        Matrix::Identity(2, 2), 0.5);
  const ProjectionModel m = lda_fit(b);
  CHECK(m.orientation == 1);
  CHECK(m.threshold == doctest::Approx(2.0));
  CHECK(m.transform.shift.isZero());
  CHECK_FALSE(m.transform.whiten.has_value());
}
