#pragma once

#include <cstddef>
#include <vector>

#include "rbg/algorithms/options.hpp"
#include "rbg/games/game.hpp"

namespace rbg::algorithms {

inline constexpr std::size_t kMaxPureProfiles = std::size_t{1} << 20;
inline constexpr std::size_t kMaxVertexSystems = std::size_t{1} << 22;

/// Every feasible integer point of an all-integer player, in lexicographic
/// order of the lattice. Throws UsageError for continuous variables and
/// BudgetExhausted when the lattice exceeds `limit` points.
std::vector<Vector> enumerateStrategies(const mathopt::PlayerProgram& p, std::size_t limit);

/// Profiles (one strategy index per player) from which no player gains by
/// more than eps, in mixed-radix order with player 0 varying slowest.
std::vector<std::vector<std::size_t>> pureEquilibria(const games::GameModel& g,
                                                     const std::vector<std::vector<Vector>>& strategies,
                                                     double eps, int workers);
std::vector<std::vector<std::size_t>> pureEquilibriaSerial(
    const games::GameModel& g, const std::vector<std::vector<Vector>>& strategies, double eps);

/// A mixed equilibrium of a bimatrix cost game: x over rows, y over columns.
struct BimatrixEquilibrium {
  Vector x;
  Vector y;
};

/// All extreme equilibria of the cost game (A for the row player, B for the
/// column player, both minimizing), by pairing completely labeled vertices of
/// the two best-response polytopes. Handles degenerate games.
std::vector<BimatrixEquilibrium> bimatrixEquilibria(const DenseMatrix& A, const DenseMatrix& B);

/// Every pure equilibrium and, for two players, every extreme mixed
/// equilibrium of the finite game on the players' integer points. Pure
/// equilibria come first. When the time limit passes the list holds a single
/// TimeLimit result.
std::vector<games::EquilibriumResult> fullEnumeration(const games::GameModel& g,
                                                      const SolverOptions& opts);

}  // namespace rbg::algorithms
