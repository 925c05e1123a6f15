#pragma once

#include <stdexcept>
#include <string>

namespace uroc {

// Malformed input or a violated dataset/config invariant.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A fairness metric cannot be evaluated, e.g. a zero group rate in the
// denominator under strict mode.
class UndefinedMetricError : public std::runtime_error {
 public:
  UndefinedMetricError(const std::string& what, int attribute)
      : std::runtime_error(what), attribute_(attribute) {}

  // Dense attribute index responsible for the failure, or -1.
  int attribute() const { return attribute_; }

 private:
  int attribute_;
};

}  // namespace uroc
