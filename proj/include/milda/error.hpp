#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace milda {

enum class ErrorCode {
  NonFiniteEntry,
  EmptySet,
  DimensionMismatch,
  InvalidArgument,
  SingleClassOnly,
  NotPositiveDefinite,
  DegenerateSpectrum,
  SingularUpdate,
  SingularScatter,
  CoincidentMeans,
  DegenerateMean,
  ZeroDirection,
  EmptyCluster,
  CovarianceCollapse,
  InsufficientWindow,
  ParseError,
  ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for errors that stem from the numbers rather than from malformed
/// input or configuration. The CLI maps these to exit code 3.
bool is_numerical(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace milda
