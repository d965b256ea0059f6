#include <doctest.h>

#include <nlohmann/json.hpp>
#include <sstream>

#include "milda/csv_io.hpp"
#include "milda/milda.hpp"
#include "milda/model_json.hpp"
#include "milda/simgen.hpp"
#include "milda/spec_file.hpp"
#include "oracles.hpp"

using namespace milda;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::ConfigError;
}

}  // namespace

TEST_CASE("csv round trip keeps every bit") {
  auto g = oracle::engine(1);
  const Matrix x = oracle::random_matrix(g, 7, 3) * 1e3;
  const std::vector<Label> y = {Label::Plus, Label::Minus, Label::Plus, Label::Plus,
                                Label::Minus, Label::Minus, Label::Plus};
  const std::vector<int> ep = {0, 0, 1, 1, 2, 3, 3};
  std::ostringstream os;
  CsvWriteOptions opts;
  opts.comments = {"seed=1"};
  opts.labels = &y;
  opts.epochs = &ep;
  write_dataset_csv(os, SampleSet(x), opts);
  CHECK(os.str().rfind("# seed=1\nx0,x1,x2,label,epoch\n", 0) == 0);

  std::istringstream is(os.str());
  const CsvDataset back = read_dataset_csv(is);
  CHECK(back.samples.data() == x);
  REQUIRE(back.labels.has_value());
  CHECK(*back.labels == y);
  CHECK(*back.epochs == ep);
}

TEST_CASE("csv without header") {
  std::istringstream is("1,2\n3,4\n");
  const CsvDataset d = read_dataset_csv(is);
  CHECK(d.samples.size() == 2);
  CHECK(d.samples.data()(1, 0) == 3.0);
  CHECK_FALSE(d.labels.has_value());
  CHECK_THROWS_AS(d.labeled(), Error);
}

TEST_CASE("csv errors") {
  std::istringstream ragged("x0,x1\n1,2\n3\n");
  CHECK(code_of([&] { read_dataset_csv(ragged); }) == ErrorCode::ParseError);
  std::istringstream bad_num("x0,x1\n1,abc\n");
  CHECK(code_of([&] { read_dataset_csv(bad_num); }) == ErrorCode::ParseError);
  std::istringstream bad_label("x0,label\n1,0\n");
  CHECK(code_of([&] { read_dataset_csv(bad_label); }) == ErrorCode::InvalidArgument);
  std::istringstream nan("x0\nnan\n");
  CHECK(code_of([&] { read_dataset_csv(nan); }) == ErrorCode::NonFiniteEntry);
  CHECK(code_of([] { read_dataset_csv_file("/nonexistent/file.csv"); }) == ErrorCode::ConfigError);
}

TEST_CASE("format_double is shortest round trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-2.0) == "-2");
  const double v = 1.0 / 3.0;
  CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("model json round trip") {
  AblationConfig cfg;
  const Dataset ds = gen_ablation(cfg);
  const PriorKnowledge p = KnownScaledClassCovariances{ds.truth.sigma_plus, ds.truth.sigma_minus, 0.5};
  const ProjectionModel m = milda_fit(ds.data.samples(), p);
  const std::string text = model_to_json(m);
  const auto j = nlohmann::json::parse(text);
  CHECK(j["format"] == "milda-projection-model");
  CHECK(j["version"] == kModelFormatVersion);
  CHECK(j["transform"].contains("whiten"));
  const ProjectionModel back = model_from_json(text);
  CHECK(back.w == m.w);
  CHECK(back.threshold == m.threshold);
  CHECK(back.orientation == m.orientation);
  CHECK(*back.transform.whiten == *m.transform.whiten);
  CHECK(back.transform.shift == m.transform.shift);
  CHECK(back.prior_kind == m.prior_kind);
  CHECK(classify(back, ds.data.samples()) == classify(m, ds.data.samples()));

  const ProjectionModel plain = milda_fit(ds.data.samples(), KnownClassMean{ds.truth.mu_plus});
  const auto jp = nlohmann::json::parse(model_to_json(plain));
  CHECK_FALSE(jp["transform"].contains("whiten"));
  CHECK_FALSE(jp["transform"].contains("d_hat"));
}

TEST_CASE("model json rejects malformed documents") {
  CHECK(code_of([] { model_from_json("{"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { model_from_json("[]"); }) == ErrorCode::ParseError);
  const std::string ok = R"({"format":"milda-projection-model","version":1,"w":[1,0],"threshold":0,
    "orientation":1,"prior_kind":"class_mean","transform":{"shift":[0,0],"alpha":0}})";
  CHECK_NOTHROW(model_from_json(ok));
  auto j = nlohmann::json::parse(ok);
  j["version"] = 2;
  CHECK(code_of([&] { model_from_json(j.dump()); }) == ErrorCode::ParseError);
  j = nlohmann::json::parse(ok);
  j["orientation"] = 0;
  CHECK(code_of([&] { model_from_json(j.dump()); }) == ErrorCode::ParseError);
  j = nlohmann::json::parse(ok);
  j["transform"]["shift"] = {0, 0, 0};
  CHECK(code_of([&] { model_from_json(j.dump()); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("prior json") {
  const Matrix s = (Matrix(2, 2) << 2, 0.5, 0.5, 1).finished();
  const PriorKnowledge priors[] = {
      KnownClassMean{(Vector(2) << 1, 2).finished()},
      KnownDifferenceDirection{(Vector(2) << 0, 3).finished()},
      KnownScaledClassCovariances{s, Matrix::Identity(2, 2), 0.3},
      KnownSharedCovarianceShape{s},
  };
  for (const auto& p : priors) {
    const PriorKnowledge back = prior_from_json(prior_to_json(p));
    CHECK(back.kind() == p.kind());
    CHECK(prior_to_json(back) == prior_to_json(p));
  }
  CHECK(code_of([] { prior_from_json(R"({"kind":"nope"})"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { prior_from_json(R"({"kind":"difference_direction","d":[0,0]})"); }) ==
        ErrorCode::ZeroDirection);
}

TEST_CASE("spec files") {
  SpecFile s = SpecFile::parse("# comment\nruns = 5\n\nsweep=rho\nvalues = 0.1, 0.2\nruns=7\n");
  CHECK(s.get_int("runs", 0) == 7);
  CHECK(s.get_string("sweep", "") == "rho");
  CHECK(s.get_doubles("values", {}) == std::vector<double>{0.1, 0.2});
  CHECK(s.get_double("missing", 1.5) == 1.5);
  s.set_assignment("seed=9");
  CHECK(s.get_u64("seed", 0) == 9);
  CHECK(s.canonical() == "runs=7\nseed=9\nsweep=rho\nvalues=0.1, 0.2\n");
  CHECK(s.get_bool("missing", true));

  CHECK(code_of([&] { s.get_int("sweep", 0); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { SpecFile::parse("novalue\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([&] { s.require_known({"runs", "seed"}); }) == ErrorCode::ConfigError);
  CHECK_NOTHROW(s.require_known({"runs", "seed", "sweep", "values"}));

  // Order of assignments does not change the hash; values do.
  const SpecFile a = SpecFile::parse("a=1\nb=2\n");
  const SpecFile b = SpecFile::parse("b=2\na=1\n");
  CHECK(a.hash() == b.hash());
  CHECK(a.hash() != SpecFile::parse("a=1\nb=3\n").hash());
  CHECK(a.hash().size() == 16);
}

TEST_CASE("fnv1a reference values") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}
