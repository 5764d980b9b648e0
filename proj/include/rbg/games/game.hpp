#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rbg/mathopt/ip.hpp"
#include "rbg/mathopt/lcp.hpp"
#include "rbg/mathopt/poly.hpp"
#include "rbg/numerics.hpp"

namespace rbg::games {

using mathopt::PlayerProgram;
using mathopt::WeightedPoint;

/// n players; player i's cross matrix has one row per opponent variable, with
/// opponents taken in ascending player order.
class GameModel {
 public:
  explicit GameModel(std::vector<PlayerProgram> players);

  std::size_t numPlayers() const { return players_.size(); }
  const PlayerProgram& player(std::size_t i) const { return players_.at(i); }
  const std::vector<PlayerProgram>& players() const { return players_; }
  std::size_t offset(std::size_t i) const { return offsets_.at(i); }
  std::size_t numVariables(std::size_t i) const { return players_.at(i).numVariables(); }
  std::size_t totalVariables() const { return offsets_.back(); }

 private:
  std::vector<PlayerProgram> players_;
  std::vector<std::size_t> offsets_;  // n + 1 entries
};

struct PlayerStrategy {
  Vector barycenter;
  std::vector<WeightedPoint> support;
};

struct StrategyProfile {
  std::vector<PlayerStrategy> players;

  /// Every player at a single point with unit weight.
  static StrategyProfile pure(const std::vector<Vector>& points);
  std::vector<Vector> barycenters() const;
  /// Single-atom supports at integral points (within eps).
  bool isPure(double eps) const;
};

enum class EquilibriumStatus { PNE, MNE, NoEquilibriumFound, TimeLimit, Infeasible, NumericalFailure };

std::string toString(EquilibriumStatus s);
std::optional<EquilibriumStatus> statusFromString(const std::string& s);

struct SolveStatistics {
  std::size_t iterations = 0;
  std::size_t cuts = 0;
  std::size_t branches = 0;
  std::size_t lcpNodes = 0;
  double wallTimeMs = 0.0;
};

struct EquilibriumResult {
  EquilibriumStatus status = EquilibriumStatus::NumericalFailure;
  StrategyProfile profile;
  Vector payoffs;
  SolveStatistics stats;
  std::string message;
};

/// sigma^j for j != i, concatenated in ascending j.
Vector opponentsVector(const GameModel& g, const std::vector<Vector>& sigma, std::size_t i);

Vector profilePayoffs(const GameModel& g, const std::vector<Vector>& sigma);

struct Deviation {
  std::size_t player;
  Vector betterResponse;
  double improvement;
};

/// Players whose best response against the barycenters improves on their
/// current payoff by more than eps. Throws PlayerInfeasible when a
/// best-response program has no solution and BudgetExhausted when the
/// deadline passes. Players are checked concurrently when workers > 1; the
/// result is in player order either way.
std::vector<Deviation> deviationCheck(const GameModel& g, const StrategyProfile& profile,
                                      double eps, int workers = 1,
                                      const mathopt::Deadline& deadline = {});
std::vector<Deviation> deviationCheckSerial(const GameModel& g, const StrategyProfile& profile,
                                            double eps, const mathopt::Deadline& deadline = {});

/// Stacked KKT system of every player's LP over its region, each region
/// written in lifted form with nonnegative variables u^i:
///
///   x^i = T^i u^i,   G^i u^i <= h^i,   u^i >= 0.
///
/// z = (u^1..u^n, mu^1..mu^n); the LCP rows for u^i are the reduced costs
/// T^iT (c^i + C^iT x^-i) + G^iT mu^i and the rows for mu^i are h^i - G^i u^i.
struct NashLCP {
  struct Block {
    std::size_t uOffset = 0;
    std::size_t uSize = 0;
    std::size_t muOffset = 0;
    std::size_t muSize = 0;
    DenseMatrix T;  // m_i x uSize
  };
  mathopt::LCP lcp;
  std::vector<Block> blocks;

  std::vector<Vector> extractProfile(std::span<const double> z) const;
};

/// Regions must live in each player's own space and have bounded pieces.
NashLCP buildNashLCP(const GameModel& g, const std::vector<mathopt::ExtendedHull>& regions);

}  // namespace rbg::games
