#include <doctest.h>

#include <atomic>
#include <cmath>
#include <sstream>

#include "milda/experiments.hpp"
#include "milda/version.hpp"

using namespace milda;

TEST_CASE("summaries skip failed runs") {
  const Summary s = summarize({0.5, std::nullopt, 0.7, 0.6});
  CHECK(s.ok == 3);
  CHECK(s.failed == 1);
  CHECK(s.mean == doctest::Approx(0.6));
  CHECK(s.sd == doctest::Approx(0.1));
  const Summary none = summarize({std::nullopt});
  CHECK(none.ok == 0);
  CHECK(none.failed == 1);
}

TEST_CASE("folded accuracy") {
  const std::vector<Label> t = {Label::Plus, Label::Plus, Label::Minus, Label::Minus};
  const std::vector<Label> p = {Label::Minus, Label::Minus, Label::Plus, Label::Plus};
  CHECK(label_accuracy(p, t, false) == doctest::Approx(0.0));
  CHECK(label_accuracy(p, t, true) == doctest::Approx(1.0));
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<int> hits(1000, 0);
  std::atomic<int> total{0};
  parallel_for(hits.size(), 4, [&](std::size_t i) {
    hits[i] += 1;
    total += 1;
  });
  CHECK(total == 1000);
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
}

TEST_CASE("metadata comments") {
  const SpecFile s = SpecFile::parse("runs=3\n");
  const auto meta = metadata_comments("ablation", s, 7);
  REQUIRE(meta.size() == 5);
  CHECK(meta[0] == "experiment=ablation");
  CHECK(meta[1] == "spec_hash=" + s.hash());
  CHECK(meta[2] == "seed=7");
  CHECK(meta[3] == std::string("version=") + kVersion);
  CHECK(meta[4].find("two-means") != std::string::npos);
}

TEST_CASE("ablation spec parsing") {
  const AblationSpec a = AblationSpec::from(SpecFile::parse("sweep=dimension\nruns=2\n"));
  CHECK(a.values == std::vector<double>{2, 5, 10, 20, 50, 100});
  CHECK(a.runs == 2);
  CHECK_THROWS_AS(AblationSpec::from(SpecFile::parse("sweep=nonsense\n")), Error);
  CHECK_THROWS_AS(AblationSpec::from(SpecFile::parse("runs=0\n")), Error);

  const AblationSpec cs = AblationSpec::from(SpecFile::parse("sweep=class_separation\n"));
  const AblationConfig pt = ablation_point(cs, 1.5);
  CHECK((pt.resolved_mu_plus() - pt.resolved_mu_minus()).norm() == doctest::Approx(1.5));
}

TEST_CASE("ablation results do not depend on the thread count") {
  AblationSpec spec = AblationSpec::from(SpecFile::parse("sweep=rho\nvalues=0.3\nruns=4\n"));
  spec.threads = 1;
  const auto one = run_ablation(spec);
  spec.threads = 3;
  const auto three = run_ablation(spec);
  REQUIRE(one.size() == three.size());
  REQUIRE(one.size() == 12);
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].summary.mean == three[i].summary.mean);
    CHECK(one[i].summary.sd == three[i].summary.sd);
  }
  std::ostringstream a, b;
  write_ablation_csv(a, spec, one, {"x"});
  write_ablation_csv(b, spec, three, {"x"});
  CHECK(a.str() == b.str());
  CHECK(a.str().find("sweep,value,prior,model,mean_pct,sd_pct,ok,failed\n") != std::string::npos);
}

TEST_CASE("single-point failures are recorded, not fatal") {
  // rho = 1 makes the class covariances singular: every LDA fit fails.
  AblationSpec spec = AblationSpec::from(SpecFile::parse("sweep=rho\nvalues=1\nruns=2\npriors=1\n"));
  const auto cells = run_ablation(spec);
  bool lda_failed = false;
  for (const auto& c : cells)
    if (c.model == ModelKind::Lda) lda_failed = c.summary.failed == 2;
  CHECK(lda_failed);
}

TEST_CASE("detection table layout") {
  DetectionSpec spec = DetectionSpec::from(SpecFile::parse("runs=2\n"));
  const auto rows = run_target_detection(spec);
  REQUIRE(rows.size() == 3);
  std::ostringstream os;
  write_detection_table(os, rows, {});
  const std::string s = os.str();
  CHECK(s.find("problem,LDA,MILDA,K-means,GMM\n") != std::string::npos);
  CHECK(s.find("zero_mean_noise,") != std::string::npos);
  CHECK(s.find("noise_covariance,") != std::string::npos);
}

TEST_CASE("stream run shapes") {
  StreamSpec spec = StreamSpec::from(SpecFile::parse(
      "runs=2\ntotal=1200\nsudden_cov_at=300\ndrift_begin=600\ndrift_end=900\nsudden_steer_at=900\n"));
  const StreamResult r = run_nonstationary(spec);
  CHECK(r.runs == 2);
  CHECK(r.epochs.size() == 1200);
  for (const auto& a : r.accuracy) CHECK(a.size() == 1200);
  CHECK(r.first_run_milda.size() == 1200);
  std::ostringstream os;
  write_stream_csv(os, r, {});
  CHECK(os.str().rfind("index,epoch,lda,milda,kmeans,gmm,lda_ma250,milda_ma250,kmeans_ma250,gmm_ma250\n", 0) == 0);
}

TEST_CASE("sensitivity grids") {
  SensitivitySpec spec = SensitivitySpec::from(SpecFile::parse("grid=21\n"));
  const auto maps = run_sensitivity(spec);
  REQUIRE(maps.size() == 3);
  CHECK(maps[0].name == "identity");
  CHECK(maps[1].sigma_hat.isApprox(5.0 * Matrix::Identity(2, 2)));
  CHECK(maps[2].sigma_hat(0, 1) == doctest::Approx(0.7));
  CHECK(maps[0].grid.xs.size() == 21);
}
