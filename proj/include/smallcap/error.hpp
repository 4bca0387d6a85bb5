#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace smallcap {

/// Input failed a precondition (bad N, sigma out of range, malformed grid, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation would exceed its configured enumeration or memory budget.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, double requested, double limit)
      : std::runtime_error(what + " (requested " + std::to_string(requested) +
                           ", limit " + std::to_string(limit) + ")"),
        requested_(requested),
        limit_(limit) {}

  double requested() const noexcept { return requested_; }
  double limit() const noexcept { return limit_; }

 private:
  double requested_;
  double limit_;
};

}  // namespace smallcap
