#pragma once

#include <stdexcept>
#include <string>

namespace interp {

/// Raised when an argument violates a documented precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A verification hypothesis (a Lipschitz bound, a Persson bound, ...) was
/// refuted by an audit. `which()` names the hypothesis.
class HypothesisFailure : public std::runtime_error {
 public:
  HypothesisFailure(std::string which, const std::string& detail)
      : std::runtime_error(which + ": " + detail), which_(std::move(which)) {}

  const std::string& which() const noexcept { return which_; }

 private:
  std::string which_;
};

}  // namespace interp
