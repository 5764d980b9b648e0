#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rbg/mathopt/lp.hpp"
#include "rbg/numerics.hpp"

namespace rbg::mathopt {

struct Bounds {
  double lower = 0.0;
  double upper = kInf;

  bool operator==(const Bounds&) const = default;
};

using Deadline = std::optional<std::chrono::steady_clock::time_point>;

struct IPBudget {
  std::size_t maxNodes = 0;  ///< 0 means unlimited
  Deadline deadline;
};

enum class IPStatus { Optimal, Infeasible, Unbounded, BudgetExhausted };

struct IPResult {
  IPStatus status = IPStatus::Infeasible;
  /// Optimal point, or the incumbent when the budget ran out.
  Vector x;
  double objective = 0.0;
  bool hasIncumbent = false;
  std::size_t nodes = 0;
};

/// Branch-and-bound over solveLP. Best-bound node selection, most fractional
/// branching variable with ties to the lowest index. Integer variables must
/// have finite bounds.
IPResult solveMIP(const LinearProgram& lp, std::span<const std::size_t> integers,
                  const IPBudget& budget = {});

/// One player's parametrized program
///
///   min_x  c.x + (x^-i)^T C x   s.t.  A x <= b,  lower <= x <= upper,
///          x_j integer for j in integers.
///
/// Rows of C follow the opponents' variables concatenated in ascending player
/// order. Immutable after construction.
class PlayerProgram {
 public:
  PlayerProgram(Vector cost, SparseMatrix cross, SparseMatrix constraints, Vector rhs,
                std::vector<std::size_t> integers, std::vector<Bounds> bounds);

  std::size_t numVariables() const { return cost_.size(); }
  std::size_t numOpponentVariables() const { return cross_.rows(); }

  const Vector& cost() const { return cost_; }
  const SparseMatrix& cross() const { return cross_; }
  const SparseMatrix& constraints() const { return constraints_; }
  const Vector& rhs() const { return rhs_; }
  const std::vector<std::size_t>& integers() const { return integers_; }
  const std::vector<Bounds>& bounds() const { return bounds_; }
  bool isInteger(std::size_t j) const { return integerMask_[j]; }

  Vector lowerBounds() const;
  Vector upperBounds() const;

  /// The LP relaxation with objective c.
  LinearProgram relaxation() const;
  /// The LP relaxation with objective `objective`.
  LinearProgram relaxation(Vector objective) const;

  /// Checks A x <= b + eps, bounds within eps and integrality within eps.
  bool isFeasible(std::span<const double> x, double eps) const;

  bool operator==(const PlayerProgram&) const = default;

 private:
  Vector cost_;
  SparseMatrix cross_;
  SparseMatrix constraints_;
  Vector rhs_;
  std::vector<std::size_t> integers_;
  std::vector<Bounds> bounds_;
  std::vector<bool> integerMask_;
};

/// c + C^T opponents: the cost the player sees once opponents are fixed.
Vector parametrizedObjective(const PlayerProgram& p, std::span<const double> opponents);

/// f(own, opponents) = c.own + opponents^T C own (minimization form).
double payoff(const PlayerProgram& p, std::span<const double> own,
              std::span<const double> opponents);

/// Best response of `p` against fixed opponents.
IPResult solveIP(const PlayerProgram& p, std::span<const double> opponents,
                 const IPBudget& budget = {});

}  // namespace rbg::mathopt
