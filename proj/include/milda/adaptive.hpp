#pragma once

// Sliding-window moments with O(D^2) push cost and prequential evaluation
// of a sliding-window label-free classifier.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "milda/milda.hpp"

namespace milda {

inline constexpr std::int64_t kRecomputeEvery = 10000;

class WindowState {
 public:
  WindowState(Eigen::Index dim, Eigen::Index capacity = 500);

  /// Adds x and evicts the oldest sample once the window is full. Every
  /// kRecomputeEvery pushes the running sums are rebuilt from the buffer.
  void push(const Vector& x);

  Eigen::Index dim() const noexcept { return buffer_.cols(); }
  Eigen::Index capacity() const noexcept { return buffer_.rows(); }
  Eigen::Index count() const noexcept { return count_; }
  std::int64_t pushes() const noexcept { return pushes_; }

  const Vector& running_sum() const noexcept { return sum_; }
  const Matrix& running_outer() const noexcept { return outer_; }

  /// Mean and biased covariance of the window from the running sums.
  GlobalStats moments() const;
  /// Window contents, oldest first.
  Matrix contents() const;
  /// Window contents in buffer order (cheaper; order does not matter for a fit).
  Matrix unordered_contents() const;

 private:
  void recompute();

  Matrix buffer_;
  Vector sum_;
  Matrix outer_;
  Eigen::Index count_ = 0;
  Eigen::Index head_ = 0;  // next slot to write
  std::int64_t pushes_ = 0;
};

/// max(2D, 10)
Eigen::Index min_refit_count(Eigen::Index dim) noexcept;

/// Fit on the window contents with moments taken from the running sums.
/// Throws InsufficientWindow below min_refit_count.
ProjectionModel refit(const WindowState& state, const PriorKnowledge& prior,
                      const MildaOptions& opts = {});

struct TraceRow {
  std::int64_t index = 0;
  Label predicted = Label::Plus;
  Label truth = Label::Plus;
  int epoch = 0;
};

struct StreamRunConfig {
  Eigen::Index window = 500;
  /// Refit after every `stride` pushes.
  std::int64_t stride = 1;
  MildaOptions opts;
};

/// Prequential run: each incoming sample is classified with the model fitted
/// before it arrived, then pushed. Before the first successful fit (and when
/// a refit fails) the previous model is kept; with no model the prediction
/// is +.
class AdaptiveClassifier {
 public:
  AdaptiveClassifier(Eigen::Index dim, PriorKnowledge prior, StreamRunConfig cfg = {});

  Label predict(const Vector& x) const;
  /// Pushes x and refits when due. Returns false if the refit failed.
  bool update(const Vector& x);

  const WindowState& state() const noexcept { return state_; }
  const std::optional<ProjectionModel>& model() const noexcept { return model_; }
  std::int64_t failed_refits() const noexcept { return failed_; }

 private:
  WindowState state_;
  PriorKnowledge prior_;
  StreamRunConfig cfg_;
  std::optional<ProjectionModel> model_;
  std::int64_t failed_ = 0;
};

/// Trailing mean: out[i] = mean of v[max(0, i-w+1) .. i].
std::vector<double> trailing_mean(const std::vector<double>& v, std::size_t w);

/// Columns index,predicted,truth,correct,epoch,correct_ma250.
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows,
                     const std::vector<std::string>& comments = {});

}  // namespace milda
