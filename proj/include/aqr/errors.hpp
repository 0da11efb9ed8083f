#pragma once

#include <stdexcept>
#include <string>

namespace aqr {

// Input-shaped failures (bad files, bad configs, violated preconditions).
struct InputError : std::runtime_error {
  explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failures.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

struct RankDeficientError : NumericError {
  explicit RankDeficientError(const std::string& msg) : NumericError(msg) {}
};

struct UnboundedError : NumericError {
  explicit UnboundedError(const std::string& msg) : NumericError(msg) {}
};

struct FlatLikelihoodError : NumericError {
  explicit FlatLikelihoodError(const std::string& msg) : NumericError(msg) {}
};

struct NonConvergenceError : NumericError {
  explicit NonConvergenceError(const std::string& msg) : NumericError(msg) {}
};

// Bootstrap / specification-test abort (replicate failure rate over threshold).
struct TestAbortError : std::runtime_error {
  explicit TestAbortError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace aqr
