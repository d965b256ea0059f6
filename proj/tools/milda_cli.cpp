// milda: experiment runner and fit/predict front end.
//
// Exit codes: 0 success, 2 configuration or input error, 3 numerical failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "milda/csv_io.hpp"
#include "milda/experiments.hpp"
#include "milda/milda.hpp"
#include "milda/model_json.hpp"

namespace fs = std::filesystem;
using namespace milda;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct ExperimentArgs {
  std::string spec_path;
  std::vector<std::string> sets;
  std::string out;
  long runs = 0;
  long long seed = -1;
  long threads = -1;
  bool full = false;
};

const std::vector<std::string> kCommonKeys = {"kind", "output_dir", "runs", "seed", "threads",
                                              "full", "lambda", "max_iters", "tol", "restarts",
                                              "replicates"};

std::vector<std::string> with_common(std::vector<std::string> keys) {
  keys.insert(keys.end(), kCommonKeys.begin(), kCommonKeys.end());
  return keys;
}

SpecFile build_spec(const ExperimentArgs& a, const std::string& kind,
                    const std::vector<std::string>& allowed) {
  SpecFile spec = a.spec_path.empty() ? SpecFile{} : SpecFile::load(a.spec_path);
  for (const auto& kv : a.sets) spec.set_assignment(kv);
  if (a.runs > 0) spec.set("runs", std::to_string(a.runs));
  if (a.seed >= 0) spec.set("seed", std::to_string(a.seed));
  if (a.threads >= 0) spec.set("threads", std::to_string(a.threads));
  if (a.full) spec.set("full", "true");
  if (!a.out.empty()) spec.set("output_dir", a.out);
  spec.require_known(with_common(allowed));
  if (auto k = spec.get("kind"); k && *k != kind) {
    raise(ErrorCode::ConfigError, "spec kind '" + *k + "' does not match command '" + kind + "'");
  }
  return spec;
}

// Output location and threads do not change results, so they stay out of the hash.
SpecFile hashed_view(const SpecFile& spec) {
  SpecFile h;
  for (const auto& [k, v] : spec.values())
    if (k != "output_dir" && k != "threads") h.set(k, v);
  return h;
}

fs::path output_dir(const SpecFile& spec) {
  fs::path dir = spec.get_string("output_dir", "results");
  fs::create_directories(dir);
  return dir;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) raise(ErrorCode::ConfigError, "cannot write '" + p.string() + "'");
  return out;
}

void add_experiment_options(CLI::App* cmd, ExperimentArgs& a) {
  cmd->add_option("--spec", a.spec_path, "key = value spec file");
  cmd->add_option("--set", a.sets, "override a spec key (key=value), repeatable");
  cmd->add_option("--out", a.out, "output directory (default: results)");
  cmd->add_option("--runs", a.runs, "Monte-Carlo runs");
  cmd->add_option("--seed", a.seed, "base seed");
  cmd->add_option("--threads", a.threads, "worker threads (0: all cores)");
  cmd->add_flag("--full", a.full, "use the full Monte-Carlo counts");
}

int cmd_ablation(const ExperimentArgs& a) {
  const SpecFile spec = build_spec(a, "ablation",
                                   {"sweep", "values", "n", "d", "rho", "sigma_blend", "q",
                                    "separation", "priors"});
  const AblationSpec as = AblationSpec::from(spec);
  const auto cells = run_ablation(as);
  const fs::path path = output_dir(spec) / ("ablation_" + as.sweep + ".csv");
  auto out = open_out(path);
  write_ablation_csv(out, as, cells, metadata_comments("ablation", hashed_view(spec), as.seed));
  std::cout << "wrote " << path.string() << '\n';
  return 0;
}

int cmd_detect(const ExperimentArgs& a) {
  const SpecFile spec = build_spec(a, "detect", {"n", "d"});
  const DetectionSpec ds = DetectionSpec::from(spec);
  const auto rows = run_target_detection(ds);
  const fs::path dir = output_dir(spec);
  const auto meta = metadata_comments("detect", hashed_view(spec), ds.seed);
  auto out = open_out(dir / "detection.csv");
  write_detection_csv(out, rows, meta);
  auto table = open_out(dir / "detection_table.csv");
  write_detection_table(table, rows, meta);
  write_detection_table(std::cout, rows, {});
  return 0;
}

int cmd_stream(const ExperimentArgs& a) {
  const SpecFile spec = build_spec(a, "stream",
                                   {"d", "total", "sudden_cov_at", "drift_begin", "drift_end",
                                    "sudden_steer_at", "window", "milda_stride",
                                    "baseline_stride"});
  const StreamSpec ss = StreamSpec::from(spec);
  const StreamResult r = run_nonstationary(ss);
  const fs::path dir = output_dir(spec);
  const auto meta = metadata_comments("stream", hashed_view(spec), ss.seed);
  auto out = open_out(dir / "stream_accuracy.csv");
  write_stream_csv(out, r, meta);
  auto trace = open_out(dir / "stream_run0_milda_trace.csv");
  write_trace_csv(trace, r.first_run_milda, meta);
  for (std::size_t m = 0; m < 4; ++m) {
    double sum = 0.0;
    for (double v : r.accuracy[m]) sum += v;
    std::cout << to_string(kAllModels[m]) << " mean accuracy "
              << 100.0 * sum / static_cast<double>(r.accuracy[m].size()) << "%\n";
  }
  return 0;
}

int cmd_sensitivity(const ExperimentArgs& a) {
  const SpecFile spec = build_spec(a, "sensitivity", {"grid", "lo", "hi"});
  const SensitivitySpec ss = SensitivitySpec::from(spec);
  const fs::path dir = output_dir(spec);
  const auto meta = metadata_comments("sensitivity", hashed_view(spec), 0);
  for (const auto& h : run_sensitivity(ss)) {
    const fs::path path = dir / ("heatmap_" + h.name + ".csv");
    auto out = open_out(path);
    write_heatmap_csv(out, h.grid, meta);
    std::cout << "wrote " << path.string() << '\n';
  }
  return 0;
}

int cmd_bench(const ExperimentArgs& a) {
  const SpecFile spec = build_spec(a, "bench", {"repeats", "n", "d"});
  const BenchSpec bs = BenchSpec::from(spec);
  const BenchResult r = run_bench(bs);
  const fs::path dir = output_dir(spec);
  const auto meta = metadata_comments("bench", hashed_view(spec), bs.seed);
  auto out = open_out(dir / "bench_timing.csv");
  write_bench_csv(out, r, meta);
  auto ratios = open_out(dir / "bench_ratios.csv");
  write_bench_ratios_csv(ratios, r, meta);
  write_bench_ratios_csv(std::cout, r, {});
  return 0;
}

int cmd_fit(const std::string& data, const std::string& prior_path, const std::string& out,
            double alpha_scale) {
  const CsvDataset ds = read_dataset_csv_file(data);
  const PriorKnowledge prior = prior_from_json(read_text_file(prior_path));
  MildaOptions opts;
  opts.alpha_scale = alpha_scale;
  const ProjectionModel m = milda_fit(ds.samples, prior, opts);
  const std::string json = model_to_json(m);
  if (out.empty() || out == "-") {
    std::cout << json;
  } else {
    write_text_file(out, json);
  }
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data, const std::string& out) {
  const ProjectionModel m = model_from_json(read_text_file(model_path));
  const CsvDataset ds = read_dataset_csv_file(data);
  const Vector scores = score(m, ds.samples);
  const auto labels = classify(m, ds.samples);
  std::ofstream file;
  if (!out.empty() && out != "-") file = open_out(out);
  std::ostream& os = file.is_open() ? static_cast<std::ostream&>(file) : std::cout;
  os << "index,score,label\n";
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    os << i << ',' << format_double(scores(i)) << ',' << to_int(labels[i]) << '\n';
  }
  if (ds.labels) {
    std::cerr << "accuracy " << accuracy(labels, *ds.labels) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Label-free LDA with one piece of prior knowledge, plus experiment runners"};
  app.require_subcommand(1);

  ExperimentArgs ablation, detect, stream, sensitivity, bench;
  add_experiment_options(app.add_subcommand("ablation", "ablation sweep over one generator knob"),
                         ablation);
  add_experiment_options(app.add_subcommand("detect", "sensor-array detection table"), detect);
  add_experiment_options(app.add_subcommand("stream", "non-stationary tracking traces"), stream);
  add_experiment_options(app.add_subcommand("sensitivity", "angle heatmaps"), sensitivity);
  add_experiment_options(app.add_subcommand("bench", "fit-time benchmark"), bench);

  std::string fit_data, fit_prior, fit_out;
  double alpha_scale = 1.0;
  auto* fit = app.add_subcommand("fit", "fit a model on a CSV and a prior JSON");
  fit->add_option("--data", fit_data, "sample CSV")->required();
  fit->add_option("--prior", fit_prior, "prior JSON")->required();
  fit->add_option("--out", fit_out, "model JSON (default: stdout)");
  fit->add_option("--alpha-scale", alpha_scale, "multiplier for the automatic alpha");

  std::string pred_model, pred_data, pred_out;
  auto* predict = app.add_subcommand("predict", "label a CSV with a fitted model");
  predict->add_option("--model", pred_model, "model JSON")->required();
  predict->add_option("--data", pred_data, "sample CSV")->required();
  predict->add_option("--out", pred_out, "labels CSV (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "ablation") return cmd_ablation(ablation);
    if (name == "detect") return cmd_detect(detect);
    if (name == "stream") return cmd_stream(stream);
    if (name == "sensitivity") return cmd_sensitivity(sensitivity);
    if (name == "bench") return cmd_bench(bench);
    if (name == "fit") return cmd_fit(fit_data, fit_prior, fit_out, alpha_scale);
    if (name == "predict") return cmd_predict(pred_model, pred_data, pred_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return is_numerical(e.code()) ? kExitNumerical : kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
