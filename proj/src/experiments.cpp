#include "milda/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include "milda/csv_io.hpp"
#include "milda/estimators.hpp"
#include "milda/lda.hpp"
#include "milda/milda.hpp"
#include "milda/rng.hpp"
#include "milda/version.hpp"

namespace milda {

namespace {

// Stream tags for derive_seed.
enum : std::uint64_t { kTagAblation = 1, kTagDetection = 2, kTagStream = 3, kTagBench = 4 };

std::string fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

bool recordable(const Error& e) { return e.code() != ErrorCode::ConfigError; }

template <typename F>
std::optional<double> guarded(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (!recordable(e)) throw;
    return std::nullopt;
  }
}

unsigned thread_count(const SpecFile& spec) {
  const long t = spec.get_int("threads", 0);
  if (t < 0) raise(ErrorCode::ConfigError, "threads must be non-negative");
  return static_cast<unsigned>(t);
}

int positive_int(const SpecFile& spec, const std::string& key, long fallback) {
  const long v = spec.get_int(key, fallback);
  if (v < 1) raise(ErrorCode::ConfigError, key + " must be at least 1");
  return static_cast<int>(v);
}

// Accuracy (percent) of the four models on one labelled data set.
std::array<std::optional<double>, 4> evaluate_models(const LabeledSampleSet& ls,
                                                     const ClassStats& truth,
                                                     const std::optional<PriorKnowledge>& prior,
                                                     const BaselineConfig& base_cfg,
                                                     std::uint64_t model_seed, bool fold) {
  std::array<std::optional<double>, 4> acc;
  const auto& labels = ls.labels();
  acc[0] = guarded([&] {
    const ProjectionModel m = lda_fit(truth, LdaVariant::Fisher);
    return 100.0 * label_accuracy(classify(m, ls.samples()), labels, fold);
  });
  if (!prior) return acc;
  acc[1] = guarded([&] {
    const ProjectionModel m = milda_fit(ls.samples(), *prior);
    return 100.0 * label_accuracy(classify(m, ls.samples()), labels, fold);
  });
  BaselineConfig cfg = base_cfg;
  cfg.seed = derive_seed(model_seed, {2});
  acc[2] = guarded([&] {
    return 100.0 * label_accuracy(kmeans_prior_fit(ls.samples(), *prior, cfg).assignments, labels, fold);
  });
  cfg.seed = derive_seed(model_seed, {3});
  acc[3] = guarded([&] {
    return 100.0 * label_accuracy(gmm_prior_fit(ls.samples(), *prior, cfg).assignments, labels, fold);
  });
  return acc;
}

bool folds(PriorKind k) {
  return k == PriorKind::ScaledClassCovariances || k == PriorKind::SharedCovarianceShape;
}

void write_summary(std::ostream& out, const Summary& s) {
  if (s.ok > 0) {
    out << fixed(s.mean) << ',' << fixed(s.sd);
  } else {
    out << ',';
  }
  out << ',' << s.ok << ',' << s.failed;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

template <typename F>
double median_ms(int repeats, F&& f) {
  f();  // warm-up
  std::vector<double> t;
  t.reserve(static_cast<std::size_t>(repeats));
  for (int r = 0; r < repeats; ++r) {
    const auto start = std::chrono::steady_clock::now();
    f();
    const auto stop = std::chrono::steady_clock::now();
    t.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
  }
  return median(std::move(t));
}

}  // namespace

std::string_view to_string(ModelKind m) noexcept {
  switch (m) {
    case ModelKind::Lda: return "lda";
    case ModelKind::Milda: return "milda";
    case ModelKind::KMeans: return "kmeans";
    case ModelKind::Gmm: return "gmm";
  }
  return "unknown";
}

Summary summarize(const std::vector<std::optional<double>>& values) {
  Summary s;
  double sum = 0.0;
  for (const auto& v : values) {
    if (v) {
      sum += *v;
      ++s.ok;
    } else {
      ++s.failed;
    }
  }
  if (s.ok == 0) return s;
  s.mean = sum / s.ok;
  if (s.ok > 1) {
    double ss = 0.0;
    for (const auto& v : values)
      if (v) ss += (*v - s.mean) * (*v - s.mean);
    s.sd = std::sqrt(ss / (s.ok - 1));
  }
  return s;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = next++; i < n && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

double label_accuracy(const std::vector<Label>& predicted, const std::vector<Label>& truth,
                      bool fold) {
  const double acc = accuracy(predicted, truth);
  return fold ? std::max(acc, 1.0 - acc) : acc;
}

std::vector<std::string> metadata_comments(const std::string& experiment, const SpecFile& spec,
                                           std::uint64_t seed) {
  return {"experiment=" + experiment,
          "spec_hash=" + spec.hash(),
          "seed=" + std::to_string(seed),
          "version=" + std::string(kVersion),
          std::string("threshold_rule=milda:") + kMildaThresholdRule + " lda:" + kLdaThresholdRule};
}

BaselineConfig baseline_config_from(const SpecFile& spec) {
  BaselineConfig c;
  c.lambda = spec.get_double("lambda", c.lambda);
  c.max_iters = static_cast<int>(spec.get_int("max_iters", c.max_iters));
  c.tol = spec.get_double("tol", c.tol);
  c.restarts = static_cast<int>(spec.get_int("restarts", c.restarts));
  c.replicates = static_cast<int>(spec.get_int("replicates", c.replicates));
  c.validate();
  return c;
}

// --- ablation -------------------------------------------------------------------

std::vector<double> AblationSpec::default_values(const std::string& sweep) {
  if (sweep == "class_separation") return {0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0};
  if (sweep == "rho") return {0.0, 0.1, 0.3, 0.5, 0.7, 0.9};
  if (sweep == "sigma_blend") return {0.0, 0.25, 0.5, 0.75, 1.0};
  if (sweep == "dimension") return {2, 5, 10, 20, 50, 100};
  if (sweep == "q") return {0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99};
  raise(ErrorCode::ConfigError, "unknown sweep parameter '" + sweep + "'");
}

AblationSpec AblationSpec::from(const SpecFile& spec) {
  AblationSpec a;
  a.sweep = spec.get_string("sweep", a.sweep);
  a.values = spec.get_doubles("values", default_values(a.sweep));
  a.runs = positive_int(spec, "runs", a.runs);
  a.seed = spec.get_u64("seed", a.seed);
  a.base.n = spec.get_int("n", a.base.n);
  a.base.d = spec.get_int("d", a.base.d);
  a.base.rho = spec.get_double("rho", a.base.rho);
  a.base.sigma_blend = spec.get_double("sigma_blend", a.base.sigma_blend);
  a.base.q = spec.get_double("q", a.base.q);
  if (spec.has("separation")) {
    a.base.mu_minus = Vector::Zero(a.base.d);
    a.base.mu_minus(0) = 1.0 - spec.get_double("separation", 2.0);
  }
  a.baseline = baseline_config_from(spec);
  if (spec.has("priors")) {
    a.priors.clear();
    for (double p : spec.get_doubles("priors", {})) a.priors.push_back(static_cast<int>(p));
  }
  a.threads = thread_count(spec);
  a.validate();
  return a;
}

void AblationSpec::validate() const {
  if (std::find_if(kAblationSweeps.begin(), kAblationSweeps.end(),
                   [&](const char* s) { return sweep == s; }) == kAblationSweeps.end()) {
    raise(ErrorCode::ConfigError, "unknown sweep parameter '" + sweep + "'");
  }
  if (runs < 1) raise(ErrorCode::ConfigError, "runs must be at least 1");
  if (values.empty()) raise(ErrorCode::ConfigError, "sweep needs at least one value");
  for (int p : priors) {
    if (p < 1 || p > 3) raise(ErrorCode::ConfigError, "ablation priors are 1, 2 or 3");
  }
  for (double v : values) ablation_point(*this, v).validate();
}

AblationConfig ablation_point(const AblationSpec& spec, double value) {
  AblationConfig c = spec.base;
  if (spec.sweep == "class_separation") {
    c.mu_minus = Vector::Zero(c.d);
    c.mu_minus(0) = 1.0 - value;
  } else if (spec.sweep == "rho") {
    c.rho = value;
  } else if (spec.sweep == "sigma_blend") {
    c.sigma_blend = value;
  } else if (spec.sweep == "dimension") {
    if (value < 1 || value != std::floor(value)) {
      raise(ErrorCode::ConfigError, "dimension values must be positive integers");
    }
    const auto d = static_cast<Eigen::Index>(value);
    auto resize = [&](const Vector& v, double first) {
      Vector out = Vector::Zero(d);
      out(0) = v.size() ? v(0) : first;
      return out;
    };
    c.mu_plus = resize(c.mu_plus, 1.0);
    c.mu_minus = resize(c.mu_minus, -1.0);
    c.d = d;
  } else if (spec.sweep == "q") {
    c.q = value;
  }
  return c;
}

PriorKnowledge ablation_prior(const ClassStats& truth, int variant) {
  switch (variant) {
    case 1: return KnownClassMean{truth.mu_plus};
    case 2: return KnownDifferenceDirection{truth.mean_difference()};
    case 3: return KnownScaledClassCovariances{truth.sigma_plus, truth.sigma_minus, truth.q};
    default: raise(ErrorCode::ConfigError, "ablation priors are 1, 2 or 3");
  }
}

std::vector<AblationCell> run_ablation(const AblationSpec& spec) {
  spec.validate();
  const std::size_t nv = spec.values.size();
  const std::size_t np = spec.priors.size();
  const std::size_t nr = static_cast<std::size_t>(spec.runs);
  // acc[(v * nr + r) * np + p] holds the four model accuracies.
  std::vector<std::array<std::optional<double>, 4>> acc(nv * nr * np);

  parallel_for(nv * nr, spec.threads, [&](std::size_t job) {
    const std::size_t v = job / nr;
    const std::size_t r = job % nr;
    AblationConfig cfg = ablation_point(spec, spec.values[v]);
    cfg.seed = derive_seed(spec.seed, {kTagAblation, v, r});
    const Dataset ds = gen_ablation(cfg);
    for (std::size_t p = 0; p < np; ++p) {
      std::optional<PriorKnowledge> prior;
      try {
        prior = ablation_prior(ds.truth, spec.priors[p]);
      } catch (const Error& e) {
        if (!recordable(e)) throw;
      }
      const bool fold = spec.priors[p] == 3;
      acc[job * np + p] = evaluate_models(ds.data, ds.truth, prior, spec.baseline,
                                          derive_seed(cfg.seed, {std::uint64_t(spec.priors[p])}), fold);
    }
  });

  std::vector<AblationCell> cells;
  for (std::size_t v = 0; v < nv; ++v) {
    for (std::size_t p = 0; p < np; ++p) {
      for (std::size_t m = 0; m < 4; ++m) {
        std::vector<std::optional<double>> vals(nr);
        for (std::size_t r = 0; r < nr; ++r) vals[r] = acc[(v * nr + r) * np + p][m];
        cells.push_back(AblationCell{spec.values[v], spec.priors[p], kAllModels[m], summarize(vals)});
      }
    }
  }
  return cells;
}

void write_ablation_csv(std::ostream& out, const AblationSpec& spec,
                        const std::vector<AblationCell>& cells,
                        const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "sweep,value,prior,model,mean_pct,sd_pct,ok,failed\n";
  for (const auto& c : cells) {
    out << spec.sweep << ',' << format_double(c.value) << ',' << c.prior << ',' << to_string(c.model)
        << ',';
    write_summary(out, c.summary);
    out << '\n';
  }
}

// --- target detection -------------------------------------------------------------

DetectionSpec DetectionSpec::from(const SpecFile& spec) {
  DetectionSpec d;
  d.runs = positive_int(spec, "runs", spec.get_bool("full", false) ? 100 : d.runs);
  d.seed = spec.get_u64("seed", d.seed);
  d.n = spec.get_int("n", d.n);
  d.d = spec.get_int("d", d.d);
  d.baseline = baseline_config_from(spec);
  d.threads = thread_count(spec);
  SensorConfig{SensorProblem::ZeroMeanNoise, d.d, d.n, 0}.validate();
  return d;
}

std::array<std::optional<double>, 4> detection_run(const SensorDataset& ds, const BaselineConfig& cfg) {
  return evaluate_models(ds.data, ds.truth, ds.prior, cfg, derive_seed(cfg.seed, {7}),
                         folds(ds.prior.kind()));
}

std::vector<DetectionRow> run_target_detection(const DetectionSpec& spec) {
  const std::array<SensorProblem, 3> problems = {SensorProblem::ZeroMeanNoise,
                                                 SensorProblem::BinarySignal,
                                                 SensorProblem::KnownNoiseCovariance};
  const std::size_t nr = static_cast<std::size_t>(spec.runs);
  std::vector<std::array<std::optional<double>, 4>> acc(problems.size() * nr);
  parallel_for(acc.size(), spec.threads, [&](std::size_t job) {
    const std::size_t p = job / nr;
    const std::size_t r = job % nr;
    const std::uint64_t seed = derive_seed(spec.seed, {kTagDetection, p, r});
    const SensorDataset ds = gen_sensor(SensorConfig{problems[p], spec.d, spec.n, seed});
    BaselineConfig cfg = spec.baseline;
    cfg.seed = seed;
    acc[job] = detection_run(ds, cfg);
  });
  std::vector<DetectionRow> rows;
  for (std::size_t p = 0; p < problems.size(); ++p) {
    DetectionRow row;
    row.problem = problems[p];
    for (std::size_t m = 0; m < 4; ++m) {
      std::vector<std::optional<double>> vals(nr);
      for (std::size_t r = 0; r < nr; ++r) vals[r] = acc[p * nr + r][m];
      row.models[m] = summarize(vals);
    }
    rows.push_back(row);
  }
  return rows;
}

void write_detection_csv(std::ostream& out, const std::vector<DetectionRow>& rows,
                         const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "problem,model,mean_pct,sd_pct,ok,failed\n";
  for (const auto& r : rows) {
    for (std::size_t m = 0; m < 4; ++m) {
      out << to_string(r.problem) << ',' << to_string(kAllModels[m]) << ',';
      write_summary(out, r.models[m]);
      out << '\n';
    }
  }
}

void write_detection_table(std::ostream& out, const std::vector<DetectionRow>& rows,
                           const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "problem,LDA,MILDA,K-means,GMM\n";
  for (const auto& r : rows) {
    out << to_string(r.problem);
    for (const auto& s : r.models) {
      out << ',';
      if (s.ok) out << fixed(s.mean, 1) << " (" << fixed(s.sd, 1) << ')';
    }
    out << '\n';
  }
}

// --- non-stationary stream ----------------------------------------------------------

StreamSpec StreamSpec::from(const SpecFile& spec) {
  StreamSpec s;
  s.runs = positive_int(spec, "runs", spec.get_bool("full", false) ? 1000 : s.runs);
  s.seed = spec.get_u64("seed", s.seed);
  s.d = spec.get_int("d", s.d);
  s.schedule.total = spec.get_int("total", s.schedule.total);
  s.schedule.sudden_cov_at = spec.get_int("sudden_cov_at", s.schedule.sudden_cov_at);
  s.schedule.drift_begin = spec.get_int("drift_begin", s.schedule.drift_begin);
  s.schedule.drift_end = spec.get_int("drift_end", s.schedule.drift_end);
  s.schedule.sudden_steer_at = spec.get_int("sudden_steer_at", s.schedule.sudden_steer_at);
  s.window = positive_int(spec, "window", s.window);
  s.milda_stride = positive_int(spec, "milda_stride", s.milda_stride);
  s.baseline_stride = positive_int(spec, "baseline_stride", s.baseline_stride);
  s.baseline = baseline_config_from(spec);
  s.threads = thread_count(spec);
  s.schedule.validate();
  if (s.d < 1) raise(ErrorCode::ConfigError, "d must be positive");
  return s;
}

StreamRunTrace stream_run(const StreamSpec& spec, std::uint64_t run_seed) {
  StreamGenerator gen(spec.schedule, spec.d, run_seed);
  const PriorKnowledge prior = KnownClassMean{Vector::Zero(spec.d)};
  const ProjectionModel lda = lda_fit(gen.truth(0), LdaVariant::Fisher);
  AdaptiveClassifier milda(spec.d, prior, StreamRunConfig{spec.window, spec.milda_stride, {}});
  std::optional<MixtureState> km, gm;

  const auto total = static_cast<std::size_t>(spec.schedule.total);
  StreamRunTrace tr;
  for (auto& c : tr.correct) c.assign(total, 0);
  tr.milda_rows.reserve(total);
  Matrix one(1, spec.d);
  while (!gen.done()) {
    const auto t = gen.index();
    const StreamSample s = gen.next();
    one.row(0) = s.x.transpose();
    const SampleSet x1(one);
    const Label pred[4] = {classify_one(lda, s.x), milda.predict(s.x),
                           km ? kmeans_predict(*km, x1)[0] : Label::Plus,
                           gm ? gmm_predict(*gm, x1)[0] : Label::Plus};
    for (int m = 0; m < 4; ++m) tr.correct[m][t] = pred[m] == s.label;
    tr.milda_rows.push_back(TraceRow{t, pred[1], s.label, s.epoch});

    milda.update(s.x);
    const auto& st = milda.state();
    if (st.pushes() % spec.baseline_stride == 0 && st.count() >= min_refit_count(spec.d)) {
      const SampleSet win(st.unordered_contents());
      BaselineConfig cfg = spec.baseline;
      cfg.seed = derive_seed(run_seed, {9, static_cast<std::uint64_t>(t)});
      try {
        km = kmeans_prior_fit(win, prior, cfg);
      } catch (const Error& e) {
        if (!recordable(e)) throw;
      }
      try {
        gm = gmm_prior_fit(win, prior, cfg);
      } catch (const Error& e) {
        if (!recordable(e)) throw;
      }
    }
  }
  return tr;
}

StreamResult run_nonstationary(const StreamSpec& spec) {
  spec.schedule.validate();
  const auto total = static_cast<std::size_t>(spec.schedule.total);
  const auto nr = static_cast<std::size_t>(spec.runs);
  std::vector<StreamRunTrace> traces(nr);
  parallel_for(nr, spec.threads, [&](std::size_t r) {
    StreamRunTrace tr = stream_run(spec, derive_seed(spec.seed, {kTagStream, r}));
    if (r != 0) tr.milda_rows.clear();
    traces[r] = std::move(tr);
  });
  StreamResult res;
  res.runs = spec.runs;
  res.epochs.resize(total);
  for (std::size_t t = 0; t < total; ++t) res.epochs[t] = spec.schedule.epoch(static_cast<std::int64_t>(t));
  for (std::size_t m = 0; m < 4; ++m) {
    std::vector<std::uint32_t> hits(total, 0);
    for (const auto& tr : traces)
      for (std::size_t t = 0; t < total; ++t) hits[t] += tr.correct[m][t];
    res.accuracy[m].resize(total);
    for (std::size_t t = 0; t < total; ++t) res.accuracy[m][t] = static_cast<double>(hits[t]) / static_cast<double>(nr);
  }
  res.first_run_milda = std::move(traces[0].milda_rows);
  return res;
}

void write_stream_csv(std::ostream& out, const StreamResult& r,
                      const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "index,epoch,lda,milda,kmeans,gmm,lda_ma250,milda_ma250,kmeans_ma250,gmm_ma250\n";
  std::array<std::vector<double>, 4> ma;
  for (std::size_t m = 0; m < 4; ++m) ma[m] = trailing_mean(r.accuracy[m], 250);
  for (std::size_t t = 0; t < r.epochs.size(); ++t) {
    out << t << ',' << r.epochs[t];
    for (std::size_t m = 0; m < 4; ++m) out << ',' << fixed(r.accuracy[m][t], 4);
    for (std::size_t m = 0; m < 4; ++m) out << ',' << fixed(ma[m][t], 4);
    out << '\n';
  }
}

// --- sensitivity --------------------------------------------------------------------

SensitivitySpec SensitivitySpec::from(const SpecFile& spec) {
  SensitivitySpec s;
  s.grid = static_cast<int>(spec.get_int("grid", s.grid));
  s.lo = spec.get_double("lo", s.lo);
  s.hi = spec.get_double("hi", s.hi);
  if (s.grid < 2) raise(ErrorCode::ConfigError, "grid needs at least two points per axis");
  if (!(s.hi > s.lo)) raise(ErrorCode::ConfigError, "hi must exceed lo");
  return s;
}

std::vector<NamedHeatmap> run_sensitivity(const SensitivitySpec& spec) {
  Vector mu_plus(2);
  mu_plus << 0.0, 1.0;
  const auto axis = linspace(spec.lo, spec.hi, spec.grid);
  const Matrix eye = Matrix::Identity(2, 2);
  const std::vector<std::pair<std::string, Matrix>> cases = {
      {"identity", eye}, {"scaled", 5.0 * eye}, {"skew", Matrix(0.3 * eye + 0.7 * Matrix::Ones(2, 2))}};
  std::vector<NamedHeatmap> out;
  for (const auto& [name, sh] : cases) {
    out.push_back(NamedHeatmap{name, sh, angle_heatmap(mu_plus, axis, axis, sh, 0.5)});
  }
  return out;
}

// --- benchmark ----------------------------------------------------------------------

BenchSpec BenchSpec::from(const SpecFile& spec) {
  BenchSpec b;
  b.repeats = positive_int(spec, "repeats", b.repeats);
  b.seed = spec.get_u64("seed", b.seed);
  b.n = spec.get_int("n", b.n);
  b.d = spec.get_int("d", b.d);
  b.baseline = baseline_config_from(spec);
  AblationConfig probe;
  probe.n = b.n;
  probe.d = b.d;
  probe.validate();
  return b;
}

BenchResult run_bench(const BenchSpec& spec) {
  BenchResult res;
  AblationConfig cfg;
  cfg.n = spec.n;
  cfg.d = spec.d;
  cfg.seed = derive_seed(spec.seed, {kTagBench, 0});
  const Dataset ds = gen_ablation(cfg);
  AblationConfig cfg2 = cfg;
  cfg2.n = 2 * spec.n;
  cfg2.seed = derive_seed(spec.seed, {kTagBench, 1});
  const Dataset ds2 = gen_ablation(cfg2);
  const SampleSet& x = ds.data.samples();
  const SampleSet& x2 = ds2.data.samples();
  volatile double sink = 0.0;

  for (int p = 1; p <= 3; ++p) {
    const PriorKnowledge prior = ablation_prior(ds.truth, p);
    BaselineConfig bcfg = spec.baseline;
    bcfg.seed = derive_seed(spec.seed, {kTagBench, 2, std::uint64_t(p)});
    const double t_lda = median_ms(spec.repeats, [&] {
      const auto m = lda_fit(ds.truth, LdaVariant::Fisher);
      sink = sink + static_cast<double>(to_int(classify(m, x)[0]));
    });
    const double t_milda = median_ms(spec.repeats, [&] {
      const auto m = milda_fit(x, prior);
      sink = sink + static_cast<double>(to_int(classify(m, x)[0]));
    });
    const double t_km = median_ms(spec.repeats, [&] {
      sink = sink + static_cast<double>(to_int(kmeans_prior_fit(x, prior, bcfg).assignments[0]));
    });
    const double t_gmm = median_ms(spec.repeats, [&] {
      sink = sink + static_cast<double>(to_int(gmm_prior_fit(x, prior, bcfg).assignments[0]));
    });
    const PriorKnowledge prior2 = ablation_prior(ds2.truth, p);
    const double t_milda2 = median_ms(spec.repeats, [&] {
      const auto m = milda_fit(x2, prior2);
      sink = sink + static_cast<double>(to_int(classify(m, x2)[0]));
    });
    res.rows.push_back({p, ModelKind::Lda, spec.n, t_lda});
    res.rows.push_back({p, ModelKind::Milda, spec.n, t_milda});
    res.rows.push_back({p, ModelKind::KMeans, spec.n, t_km});
    res.rows.push_back({p, ModelKind::Gmm, spec.n, t_gmm});
    res.rows.push_back({p, ModelKind::Milda, 2 * spec.n, t_milda2});
    res.ratios.push_back({p, t_milda / t_lda, t_gmm / t_milda, t_km / t_milda, t_milda2 / t_milda});
  }
  return res;
}

void write_bench_csv(std::ostream& out, const BenchResult& r,
                     const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "prior,model,n,median_ms\n";
  for (const auto& row : r.rows) {
    out << row.prior << ',' << to_string(row.model) << ',' << row.n << ',' << fixed(row.median_ms, 5)
        << '\n';
  }
}

void write_bench_ratios_csv(std::ostream& out, const BenchResult& r,
                            const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "prior,milda_over_lda,gmm_over_milda,kmeans_over_milda,milda_2n_over_n\n";
  for (const auto& q : r.ratios) {
    out << q.prior << ',' << fixed(q.milda_over_lda) << ',' << fixed(q.gmm_over_milda) << ','
        << fixed(q.kmeans_over_milda) << ',' << fixed(q.milda_doubling) << '\n';
  }
}

}  // namespace milda
