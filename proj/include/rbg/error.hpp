#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rbg {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller violated a precondition (dimension mismatch, bad index, mutation
/// after finalize, ...).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// A document could not be parsed. The message names the offending field path.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A document parsed but violates a model invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A solver could not reach a trustworthy answer within its pivot budget.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// Every piece handed to convexHull was empty.
class EmptyUnion : public Error {
 public:
  using Error::Error;
};

/// A finite enumeration or search exceeded its configured budget.
class BudgetExhausted : public Error {
 public:
  using Error::Error;
};

/// Some player's feasible set has no integer point.
class PlayerInfeasible : public Error {
 public:
  PlayerInfeasible(std::size_t player, const std::string& what)
      : Error(what), player_(player) {}
  std::size_t player() const { return player_; }

 private:
  std::size_t player_;
};

}  // namespace rbg
