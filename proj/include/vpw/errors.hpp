#pragma once

#include <stdexcept>
#include <string>

namespace vpw {

/// Every particle weight vanished (observation density underflow). Tree
/// solvers recover by resampling the branch; sparse solvers abort the plan.
class DegenerateBelief : public std::runtime_error {
 public:
  explicit DegenerateBelief(const std::string& what) : std::runtime_error(what) {}
};

/// Planning asked for an action where none can exist (zero horizon).
class EmptyPlan : public std::runtime_error {
 public:
  explicit EmptyPlan(const std::string& what) : std::runtime_error(what) {}
};

/// Search budget admitted no simulations.
class EmptyTree : public std::runtime_error {
 public:
  explicit EmptyTree(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid experiment description or CSV layout.
class SpecError : public std::runtime_error {
 public:
  explicit SpecError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace vpw
