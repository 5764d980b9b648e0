#pragma once

#include <cstdint>

#include "rbg/models/instance.hpp"

namespace rbg::corpus {

struct GeneratorSpec {
  std::uint64_t seed = 1;
  std::size_t players = 2;
  std::size_t items = 2;
  /// c in [-range, -1], C entries in [-range, range], weights in [1, range].
  std::int64_t range = 5;
  /// b = ceil(capacityFraction * sum of weights).
  double capacityFraction = 0.5;

  void validate() const;
};

/// Two players, two binary items each, single knapsack row apiece.
models::Instance canonicalKnapsackGame();

/// Deterministic in spec.seed; the zero profile is always feasible.
models::Instance randomKnapsackGame(const GeneratorSpec& spec);

/// The blue player alone.
models::Instance singlePlayerKnapsack();

/// The canonical game with red additionally forced to pack more than it can.
models::Instance emptyFeasibleSetGame();

}  // namespace rbg::corpus
