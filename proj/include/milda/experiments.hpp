#pragma once

// Monte-Carlo experiment drivers behind the CLI. Every run draws from its
// own derived seed and results are stored by run index, so the output does
// not depend on the thread count.

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "milda/adaptive.hpp"
#include "milda/baselines.hpp"
#include "milda/sensitivity.hpp"
#include "milda/simgen.hpp"
#include "milda/spec_file.hpp"

namespace milda {

enum class ModelKind { Lda, Milda, KMeans, Gmm };
inline constexpr std::array<ModelKind, 4> kAllModels = {ModelKind::Lda, ModelKind::Milda,
                                                        ModelKind::KMeans, ModelKind::Gmm};
std::string_view to_string(ModelKind m) noexcept;

/// Accuracy summary in percent. Failed runs are counted, not averaged.
struct Summary {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation
  int ok = 0;
  int failed = 0;
};

Summary summarize(const std::vector<std::optional<double>>& values);

/// Calls fn(i) for i in [0, n) on up to `threads` workers (0: hardware
/// concurrency). fn must only write to slot i of its outputs.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

/// Fraction correct; with fold, max(acc, 1 - acc) for priors that cannot
/// tell which cluster is which class.
double label_accuracy(const std::vector<Label>& predicted, const std::vector<Label>& truth,
                      bool fold);

/// Metadata comment lines for every CSV.
std::vector<std::string> metadata_comments(const std::string& experiment, const SpecFile& spec,
                                           std::uint64_t seed);

BaselineConfig baseline_config_from(const SpecFile& spec);

// --- ablation -------------------------------------------------------------------

inline constexpr std::array<const char*, 5> kAblationSweeps = {
    "class_separation", "rho", "sigma_blend", "dimension", "q"};

struct AblationSpec {
  std::string sweep = "class_separation";
  std::vector<double> values;
  int runs = 50;
  std::uint64_t seed = 1;
  AblationConfig base;
  BaselineConfig baseline;
  std::vector<int> priors = {1, 2, 3};
  unsigned threads = 0;

  static AblationSpec from(const SpecFile& spec);
  static std::vector<double> default_values(const std::string& sweep);
  void validate() const;
};

/// Generator config for one sweep point. class_separation v puts mu- at
/// (1 - v, 0, ..., 0), i.e. ||mu+ - mu-|| = v.
AblationConfig ablation_point(const AblationSpec& spec, double value);

/// Prior variant 1, 2 or 3 built from the ground-truth statistics.
PriorKnowledge ablation_prior(const ClassStats& truth, int variant);

struct AblationCell {
  double value = 0.0;
  int prior = 1;
  ModelKind model = ModelKind::Lda;
  Summary summary;
};

std::vector<AblationCell> run_ablation(const AblationSpec& spec);
void write_ablation_csv(std::ostream& out, const AblationSpec& spec,
                        const std::vector<AblationCell>& cells,
                        const std::vector<std::string>& comments);

// --- target detection -------------------------------------------------------------

struct DetectionSpec {
  int runs = 100;
  std::uint64_t seed = 1;
  Eigen::Index n = 1000;
  Eigen::Index d = 10;
  BaselineConfig baseline;
  unsigned threads = 0;

  static DetectionSpec from(const SpecFile& spec);
};

struct DetectionRow {
  SensorProblem problem = SensorProblem::ZeroMeanNoise;
  std::array<Summary, 4> models;  // indexed like kAllModels
};

/// Accuracy of the four models on one generated data set.
std::array<std::optional<double>, 4> detection_run(const SensorDataset& ds, const BaselineConfig& cfg);

std::vector<DetectionRow> run_target_detection(const DetectionSpec& spec);
/// Long form: problem,model,mean_pct,sd_pct,ok,failed.
void write_detection_csv(std::ostream& out, const std::vector<DetectionRow>& rows,
                         const std::vector<std::string>& comments);
/// Table layout: problem,LDA,MILDA,K-means,GMM with "mean (sd)" cells.
void write_detection_table(std::ostream& out, const std::vector<DetectionRow>& rows,
                           const std::vector<std::string>& comments);

// --- non-stationary stream ----------------------------------------------------------

struct StreamSpec {
  int runs = 100;
  std::uint64_t seed = 1;
  ChangeSchedule schedule;
  Eigen::Index d = 10;
  Eigen::Index window = 500;
  std::int64_t milda_stride = 1;
  std::int64_t baseline_stride = 250;
  BaselineConfig baseline;
  unsigned threads = 0;

  static StreamSpec from(const SpecFile& spec);
};

struct StreamRunTrace {
  std::array<std::vector<std::uint8_t>, 4> correct;  // per model, per index
  std::vector<TraceRow> milda_rows;
};

StreamRunTrace stream_run(const StreamSpec& spec, std::uint64_t run_seed);

struct StreamResult {
  std::vector<int> epochs;
  std::array<std::vector<double>, 4> accuracy;  // run-averaged, fraction
  std::vector<TraceRow> first_run_milda;
  int runs = 0;
};

StreamResult run_nonstationary(const StreamSpec& spec);
/// index,epoch,lda,milda,kmeans,gmm then the four 250-sample trailing means.
void write_stream_csv(std::ostream& out, const StreamResult& r,
                      const std::vector<std::string>& comments);

// --- sensitivity --------------------------------------------------------------------

struct SensitivitySpec {
  int grid = 201;
  double lo = -2.0;
  double hi = 2.0;

  static SensitivitySpec from(const SpecFile& spec);
};

struct NamedHeatmap {
  std::string name;  // identity, scaled, skew
  Matrix sigma_hat;
  HeatmapGrid grid;
};

std::vector<NamedHeatmap> run_sensitivity(const SensitivitySpec& spec);

// --- benchmark ----------------------------------------------------------------------

struct BenchSpec {
  int repeats = 30;
  std::uint64_t seed = 1;
  Eigen::Index n = 1000;
  Eigen::Index d = 10;
  BaselineConfig baseline;

  static BenchSpec from(const SpecFile& spec);
};

struct BenchRow {
  int prior = 1;
  ModelKind model = ModelKind::Lda;
  Eigen::Index n = 0;
  double median_ms = 0.0;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  /// Per prior: milda/lda, gmm/milda, kmeans/milda, milda(2N)/milda(N).
  struct Ratios {
    int prior = 1;
    double milda_over_lda = 0.0;
    double gmm_over_milda = 0.0;
    double kmeans_over_milda = 0.0;
    double milda_doubling = 0.0;
  };
  std::vector<Ratios> ratios;
};

/// Median wall time of fit plus classification of the N training samples.
/// LDA is given the ground-truth statistics.
BenchResult run_bench(const BenchSpec& spec);
void write_bench_csv(std::ostream& out, const BenchResult& r,
                     const std::vector<std::string>& comments);
void write_bench_ratios_csv(std::ostream& out, const BenchResult& r,
                            const std::vector<std::string>& comments);

}  // namespace milda
