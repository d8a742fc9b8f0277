#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace actbe {

/// Raised when a caller passes arguments outside an operation's domain.
class argument_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an operation is well-formed but undefined for the given state
/// (e.g. amplification of a state with zero coherence).
class unsupported_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// One violated state invariant, as reported by `validate`.
struct Violation {
  std::string invariant;
  std::string detail;
};

class validation_error : public std::runtime_error {
 public:
  explicit validation_error(std::vector<Violation> violations)
      : std::runtime_error(summarize(violations)), violations_(std::move(violations)) {}

  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  static std::string summarize(const std::vector<Violation>& vs) {
    std::string msg = "invalid state:";
    for (const auto& v : vs) {
      msg += " [" + v.invariant + ": " + v.detail + "]";
    }
    return msg;
  }

  std::vector<Violation> violations_;
};

}  // namespace actbe
