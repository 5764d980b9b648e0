#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rbg/mathopt/ip.hpp"
#include "rbg/numerics.hpp"

namespace rbg::mathopt {

/// Find z >= 0 with w = M z + q >= 0 and z^T w = 0.
struct LCP {
  DenseMatrix M;
  Vector q;

  std::size_t size() const { return q.size(); }
  void validate() const;
  Vector residual(std::span<const double> z) const;
};

enum class LCPMethod { Branching, Lemke };

/// Per-index node fixing: z_j = 0, w_j = 0, or undecided.
enum class Fixing : std::uint8_t { Free, ZVarZero, WZero };

struct LCPSolution {
  Vector z;
  Vector w;
  LCPMethod method = LCPMethod::Branching;
};

enum class LCPStatus {
  Solved,
  NoSolution,       ///< certified empty (Branching with budget to spare)
  Inconclusive,     ///< Lemke ray termination or pivot cap
  BudgetExhausted,
};

struct LCPOutcome {
  LCPStatus status = LCPStatus::NoSolution;
  std::optional<LCPSolution> solution;
  std::size_t nodes = 0;
  std::size_t pivots = 0;
};

struct LCPBudget {
  std::size_t maxNodes = 0;  ///< 0 means unlimited
  Deadline deadline;
  int workers = 1;
  std::size_t maxPivots = 0;  ///< Lemke only; 0 picks 50 * n + 100
};

/// True iff z >= -eps, w >= -eps and z^T w <= n * eps.
bool satisfiesLCP(const LCP& lcp, std::span<const double> z, double eps);

struct LCPPoint {
  Vector z;
  Vector w;
};

/// Node relaxation of the branching method: a point of
/// {z >= 0, w = M z + q >= 0} honoring the fixings, chosen to minimize the sum
/// of z_j + w_j over free indexes. std::nullopt when the node is infeasible.
std::optional<LCPPoint> solveLCPWithFixings(const LCP& lcp, std::span<const Fixing> fixings);

LCPOutcome solveLCP(const LCP& lcp, LCPMethod method, const LCPBudget& budget = {});

/// Depth-first complementarity branching. Complete: NoSolution certifies that
/// the LCP has no solution.
LCPOutcome solveLCPBranchingSerial(const LCP& lcp, const LCPBudget& budget = {});

/// Same search with the tree split at a shallow frontier and the subtrees
/// explored by OpenMP workers. Returns the solution the serial search would
/// return (the first in depth-first order) whenever the budget is not hit.
LCPOutcome solveLCPBranchingParallel(const LCP& lcp, const LCPBudget& budget);

/// Lemke's complementary pivoting with covering vector e.
LCPOutcome solveLCPLemke(const LCP& lcp, const LCPBudget& budget = {});

}  // namespace rbg::mathopt
