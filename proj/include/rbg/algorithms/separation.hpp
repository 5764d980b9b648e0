#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "rbg/mathopt/ip.hpp"
#include "rbg/mathopt/poly.hpp"
#include "rbg/numerics.hpp"

namespace rbg::algorithms {

using mathopt::PlayerProgram;
using mathopt::Polyhedron;
using mathopt::WeightedPoint;

/// coefficients . x <= rhs
struct Cut {
  Vector coefficients;
  double rhs = 0.0;

  double violation(std::span<const double> x) const { return dot(coefficients, x) - rhs; }
};

/// A player's outer approximation: the union of `pieces`, each the LP
/// relaxation intersected with every cut so far and with branching bounds.
struct PlayerRegion {
  std::vector<Polyhedron> pieces;
  std::vector<Cut> cuts;
  std::size_t branches = 0;

  /// The LP relaxation as a single piece. Requires finite bounds.
  static PlayerRegion initial(const PlayerProgram& p);
  mathopt::ExtendedHull hull() const;
};

enum class SeparationKind { Member, Cuts, Branch, Infeasible };

struct SeparationResult {
  SeparationKind kind = SeparationKind::Member;
  /// Member: sigma as a combination of feasible points.
  std::vector<WeightedPoint> support;
  std::vector<Cut> cuts;
  std::size_t piece = 0;
  std::size_t variable = 0;
  /// Value of the branching variable at the fractional point.
  double value = 0.0;
};

/// Knapsack cover inequality from row `row` of the player's constraints,
/// violated by sigma by at least minViolation. Only rows over binary
/// variables qualify.
std::optional<Cut> knapsackCover(const PlayerProgram& p, std::size_t row,
                                 std::span<const double> sigma, double minViolation);

/// Gomory mixed-integer cuts read off an optimal tableau of the LP over
/// `piece` at a vertex equal to sigma. Only valid when `piece` carries no
/// branching bounds (its integer points are those of the player).
std::vector<Cut> gomoryCuts(const PlayerProgram& p, const Polyhedron& piece,
                            std::span<const double> sigma, double minViolation);

/// Decides whether sigma (a point of the region's hull) lies in the convex
/// hull of the player's feasible set, or returns cuts violated by sigma, or a
/// piece and integer variable to branch on.
SeparationResult separationOracle(const PlayerProgram& p, std::span<const double> sigma,
                                  const PlayerRegion& region);

/// Applies cuts or a branching. Returns false when every piece became empty.
bool refineRegion(PlayerRegion& region, const SeparationResult& action);

}  // namespace rbg::algorithms
