#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "rbg/algorithms/options.hpp"
#include "rbg/games/game.hpp"

namespace rbg::models {

using Json = nlohmann::json;

struct NamedPlayer {
  std::string name;
  mathopt::PlayerProgram program;

  bool operator==(const NamedPlayer&) const = default;
};

/// A game under construction. Players are appended in order; that order fixes
/// the row layout of every C. Once finalized (explicitly or by solve) the
/// instance refuses further changes.
class Instance {
 public:
  explicit Instance(std::string name = "game") : name_(std::move(name)) {}

  const std::string& name() const { return name_; }
  const std::vector<NamedPlayer>& players() const { return players_; }
  std::size_t numPlayers() const { return players_.size(); }
  bool finalized() const { return finalized_; }

  /// Throws UsageError on a duplicate name, after finalize, or when the C row
  /// counts can no longer be made consistent by adding further players.
  Instance& addPlayer(mathopt::PlayerProgram p, std::string name);

  /// Opponent variables still expected by every C (0 once complete).
  std::size_t missingOpponentVariables() const;

  void finalize();
  games::GameModel game() const;

  bool operator==(const Instance& o) const { return name_ == o.name_ && players_ == o.players_; }

 private:
  std::string name_;
  std::vector<NamedPlayer> players_;
  bool finalized_ = false;
};

/// Canonical document: sorted keys, row-major sparse entries, integral values
/// as integers, shortest round-trip decimals otherwise.
Json toJson(const Instance& instance);
/// ParseError names the field path of malformed data; ValidationError reports
/// dimension or bound violations.
Instance instanceFromJson(const Json& doc);

std::string serialize(const Instance& instance);
Instance parseInstance(const std::string& text);

void saveInstance(const Instance& instance, const std::filesystem::path& path);
Instance loadInstance(const std::filesystem::path& path);

struct PlayerResult {
  std::string name;
  Vector x;
  double payoff = 0.0;
  std::vector<mathopt::WeightedPoint> support;
};

struct ResultDocument {
  std::string status;
  std::string message;
  std::vector<PlayerResult> players;
  games::SolveStatistics stats;

  static ResultDocument from(const Instance& instance, const games::EquilibriumResult& result);
};

Json toJson(const ResultDocument& doc);
ResultDocument resultFromJson(const Json& doc);

/// Finalizes the instance and runs the selected algorithm. Cut-And-Play yields
/// one result, full enumeration one per equilibrium. An empty feasible set
/// becomes a single Infeasible result.
std::vector<games::EquilibriumResult> solve(Instance& instance,
                                            const algorithms::SolverOptions& opts);

}  // namespace rbg::models
