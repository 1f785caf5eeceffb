#pragma once

#include <stdexcept>
#include <string>

namespace qaybe {

/// A parameter combination sits closer to a pole than the configured margin.
class PoleProximityError : public std::domain_error {
  public:
    explicit PoleProximityError(const std::string& what)
        : std::domain_error(what) {}
};

/// Two independent constructions of the same operator disagree.
class CrossCheckError : public std::runtime_error {
  public:
    CrossCheckError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

  private:
    double residual_;
};

/// Refused to run something that would exceed the memory budget.
class MemoryBudgetError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace qaybe
