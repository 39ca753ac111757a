#pragma once

#include <stdexcept>
#include <string>

namespace scnls {

/// Bad input: malformed configuration, violated preconditions.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A run was aborted by one of the solver guards (resolution, singularity,
/// non-finite values).
class SolverGuardError : public std::runtime_error {
 public:
  SolverGuardError(const std::string& what, double last_good_time)
      : std::runtime_error(what), last_good_time_(last_good_time) {}

  double last_good_time() const noexcept { return last_good_time_; }

 private:
  double last_good_time_;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

}  // namespace scnls
