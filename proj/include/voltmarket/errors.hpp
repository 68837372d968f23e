#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace voltmarket {

/// Index or window outside the available data.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// A configuration or scenario failed validation. Carries every violation
/// found, not only the first one.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> problems);

  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Operation invoked in the wrong environment phase (e.g. stepping after done).
class LifecycleError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Learning produced a non-finite quantity.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed external input (CSV row, JSON document).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Persisted artifact written by an incompatible schema version.
class VersionError : public std::runtime_error {
 public:
  VersionError(int expected, int found);

  int expected() const noexcept { return expected_; }
  int found() const noexcept { return found_; }

 private:
  int expected_;
  int found_;
};

}  // namespace voltmarket
