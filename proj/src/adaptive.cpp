#include "milda/adaptive.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace milda {

WindowState::WindowState(Eigen::Index dim, Eigen::Index capacity)
    : buffer_(Matrix::Zero(capacity, dim)),
      sum_(Vector::Zero(dim)),
      outer_(Matrix::Zero(dim, dim)) {
  if (dim < 1 || capacity < 1) raise(ErrorCode::ConfigError, "window needs positive size");
}

void WindowState::push(const Vector& x) {
  if (x.size() != dim()) raise(ErrorCode::DimensionMismatch, "window push");
  if (!x.allFinite()) raise(ErrorCode::NonFiniteEntry, "window push");
  if (count_ == capacity()) {
    const Vector old = buffer_.row(head_).transpose();
    sum_ -= old;
    outer_.noalias() -= old * old.transpose();
  } else {
    ++count_;
  }
  buffer_.row(head_) = x.transpose();
  sum_ += x;
  outer_.noalias() += x * x.transpose();
  head_ = (head_ + 1) % capacity();
  if (++pushes_ % kRecomputeEvery == 0) recompute();
}

void WindowState::recompute() {
  const Matrix rows = unordered_contents();
  sum_ = rows.colwise().sum().transpose();
  outer_.noalias() = rows.transpose() * rows;
}

GlobalStats WindowState::moments() const {
  if (count_ == 0) raise(ErrorCode::EmptySet, "window is empty");
  const double n = static_cast<double>(count_);
  Vector mean = sum_ / n;
  Matrix cov = symmetrize(outer_ / n - mean * mean.transpose());
  return GlobalStats{std::move(mean), std::move(cov)};
}

Matrix WindowState::unordered_contents() const {
  return buffer_.topRows(count_);
}

Matrix WindowState::contents() const {
  if (count_ < capacity()) return buffer_.topRows(count_);
  Matrix out(count_, dim());
  const Eigen::Index tail = capacity() - head_;
  out.topRows(tail) = buffer_.bottomRows(tail);
  out.bottomRows(head_) = buffer_.topRows(head_);
  return out;
}

Eigen::Index min_refit_count(Eigen::Index dim) noexcept {
  return std::max<Eigen::Index>(2 * dim, 10);
}

ProjectionModel refit(const WindowState& state, const PriorKnowledge& prior,
                      const MildaOptions& opts) {
  if (state.count() < min_refit_count(state.dim())) {
    raise(ErrorCode::InsufficientWindow,
          "window holds " + std::to_string(state.count()) + " samples, need " +
              std::to_string(min_refit_count(state.dim())));
  }
  return detail::fit_from_moments(state.unordered_contents(), state.moments(), prior, opts);
}

AdaptiveClassifier::AdaptiveClassifier(Eigen::Index dim, PriorKnowledge prior,
                                       StreamRunConfig cfg)
    : state_(dim, cfg.window), prior_(std::move(prior)), cfg_(cfg) {
  if (cfg_.stride < 1) raise(ErrorCode::ConfigError, "refit stride must be positive");
}

Label AdaptiveClassifier::predict(const Vector& x) const {
  return model_ ? classify_one(*model_, x) : Label::Plus;
}

bool AdaptiveClassifier::update(const Vector& x) {
  state_.push(x);
  if (state_.pushes() % cfg_.stride != 0) return true;
  if (state_.count() < min_refit_count(state_.dim())) return true;
  try {
    model_ = refit(state_, prior_, cfg_.opts);
    return true;
  } catch (const Error& e) {
    if (!is_numerical(e.code())) throw;
    ++failed_;
    return false;
  }
}

std::vector<double> trailing_mean(const std::vector<double>& v, std::size_t w) {
  std::vector<double> out(v.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    acc += v[i];
    if (i >= w) acc -= v[i - w];
    out[i] = acc / static_cast<double>(std::min(i + 1, w));
  }
  return out;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows,
                     const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  std::vector<double> correct(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) correct[i] = rows[i].predicted == rows[i].truth;
  const auto ma = trailing_mean(correct, 250);
  out << "index,predicted,truth,correct,epoch,correct_ma250\n";
  char buf[32];
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.4f", ma[i]);
    out << rows[i].index << ',' << to_int(rows[i].predicted) << ',' << to_int(rows[i].truth)
        << ',' << static_cast<int>(correct[i]) << ',' << rows[i].epoch << ',' << buf << '\n';
  }
}

}  // namespace milda
