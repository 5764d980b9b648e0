#pragma once

#include <cstddef>
#include <vector>

#include "rbg/numerics.hpp"

namespace rbg::mathopt {

enum class RowSense : unsigned char { LessEqual, Equal };

/// min c.x  s.t.  A x (<= | =) b,  lower <= x <= upper.
///
/// `senses` may be left empty, in which case every row is `<=`. Bounds may be
/// infinite.
struct LinearProgram {
  Vector objective;
  DenseMatrix constraints;
  Vector rhs;
  Vector lower;
  Vector upper;
  std::vector<RowSense> senses;

  /// An LP over `n` variables with zero objective, no rows and the given bounds.
  static LinearProgram withBounds(Vector lower, Vector upper);

  std::size_t numVariables() const { return objective.size(); }
  std::size_t numRows() const { return rhs.size(); }
  RowSense sense(std::size_t r) const { return senses.empty() ? RowSense::LessEqual : senses[r]; }

  void addRow(std::span<const double> coefficients, double bound,
              RowSense s = RowSense::LessEqual);

  /// Throws UsageError on inconsistent dimensions, lower > upper or NaN data.
  void validate() const;
};

enum class LPStatus { Optimal, Infeasible, Unbounded };

/// Result of solveLP. Multipliers follow the Lagrangian
/// c + A^T rowDuals - reducedCosts = 0, with rowDuals >= 0 on `<=` rows and
/// reducedCosts > 0 (< 0) signalling an active lower (upper) bound.
struct LPResult {
  LPStatus status = LPStatus::Infeasible;
  Vector x;
  double objective = 0.0;
  Vector rowDuals;
  Vector reducedCosts;
  std::size_t pivots = 0;
};

/// Final simplex tableau B^-1 [A | I] over structural and slack columns, as
/// needed for Gomory cut derivation. Slack s_r = b_r - A_r x.
struct OptimalTableau {
  std::size_t numStructural = 0;
  std::size_t numRows = 0;
  /// basis[r] is the column basic in tableau row r, or -1 for a redundant row.
  std::vector<long> basis;
  /// numRows x (numStructural + numRows).
  DenseMatrix rows;
  /// Value of every column (structural then slack) at the optimal vertex.
  Vector values;
  Vector lower;
  Vector upper;
};

struct SimplexOptions {
  /// Pivots after which pricing switches from Dantzig to Bland's rule.
  std::size_t blandAfter = 0;  // 0: 20 * (rows + columns)
  /// Hard pivot budget; exceeding it throws NumericalFailure.
  std::size_t maxPivots = 0;  // 0: 200 * (rows + columns) + 1000
};

/// Solves the LP with a two-phase bounded-variable primal simplex.
/// Throws NumericalFailure if the pivot budget runs out.
LPResult solveLP(const LinearProgram& lp, const SimplexOptions& options = {},
                 OptimalTableau* tableau = nullptr);

}  // namespace rbg::mathopt
