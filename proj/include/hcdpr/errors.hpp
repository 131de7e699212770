#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hcdpr {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration document; `line` is 1-based, 0 when unknown.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::size_t line = 0)
      : Error(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A parameter violates a type invariant.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class DegenerateGeometryError : public Error {
 public:
  using Error::Error;
};

/// Target outside the reachable set (negative radicand, out-of-reach arm).
class WorkspaceError : public Error {
 public:
  using Error::Error;
};

class SingularConfigurationError : public Error {
 public:
  using Error::Error;
};

class ConstraintDegeneracyError : public Error {
 public:
  using Error::Error;
};

class SingularInertiaError : public Error {
 public:
  using Error::Error;
};

struct LambdaInterval {
  double lower;
  double upper;
};

/// The tension bounds admit no λ3; carries the per-cable λ3 intervals and the
/// cables whose intervals do not overlap.
class InfeasibleTensionError : public Error {
 public:
  InfeasibleTensionError(const std::string& what,
                         std::vector<LambdaInterval> intervals,
                         std::vector<int> violating)
      : Error(what),
        intervals_(std::move(intervals)),
        violating_(std::move(violating)) {}
  const std::vector<LambdaInterval>& intervals() const { return intervals_; }
  const std::vector<int>& violating_cables() const { return violating_; }

 private:
  std::vector<LambdaInterval> intervals_;
  std::vector<int> violating_;
};

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, double t, int channel)
      : Error(what), t_(t), channel_(channel) {}
  double time() const { return t_; }
  int channel() const { return channel_; }

 private:
  double t_;
  int channel_;
};

/// Caller broke an operation precondition (dimension mismatch, time order).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace hcdpr
