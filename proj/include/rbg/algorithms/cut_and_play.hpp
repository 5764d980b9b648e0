#pragma once

#include <functional>
#include <vector>

#include "rbg/algorithms/options.hpp"
#include "rbg/algorithms/separation.hpp"
#include "rbg/games/game.hpp"

namespace rbg::algorithms {

/// Called after every refinement with the iteration number and the regions.
using RefinementObserver = std::function<void(std::size_t, const std::vector<PlayerRegion>&)>;

/// Outer-approximation loop: solve the game over the current regions as an
/// LCP, certify or refine each player's strategy, and repeat. Returns the
/// first equilibrium found.
games::EquilibriumResult cutAndPlay(const games::GameModel& g, const SolverOptions& opts,
                                    const RefinementObserver& observer = {});

}  // namespace rbg::algorithms
