// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cachenet {

// Root of the library's exception hierarchy.  Everything thrown on purpose
// derives from this, so callers can catch cachenet::Error at the boundary.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input x outside [0,1], or a function outside the admissible class.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Structurally invalid argument (non-positive counts, bad ranges, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// An operation was called in a state that does not support it.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A factory could not produce an object satisfying its own contract.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

// The per-interval profile lookup failed its error certificate.
class AssignmentError : public Error {
 public:
  AssignmentError(const std::string& what, int interval)
      : Error(what), interval_(interval) {}
  int interval() const { return interval_; }

 private:
  int interval_;
};

// A network (or serialized blob) violates the expected wiring.
class StructureError : public Error {
 public:
  using Error::Error;
};

// File could not be read/written/parsed.
class IoError : public Error {
 public:
  using Error::Error;
};

// Regression fit was asked for with too little or degenerate data.
class FitError : public Error {
 public:
  using Error::Error;
};

// Requested depth budget cannot host any admissible configuration.
// Carries the smallest workable budget and the next workable budget at or
// above the requested one (feasibility is not monotone in the budget).
class InfeasibleBudgetError : public ParameterError {
 public:
  InfeasibleBudgetError(const std::string& what, std::int64_t n_min,
                        std::int64_t next_feasible)
      : ParameterError(what), n_min_(n_min), next_feasible_(next_feasible) {}
  std::int64_t min_feasible() const { return n_min_; }
  std::int64_t next_feasible() const { return next_feasible_; }

 private:
  std::int64_t n_min_;
  std::int64_t next_feasible_;
};

}  // namespace cachenet
