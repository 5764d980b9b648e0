#include "rbg/algorithms/cut_and_play.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <algorithm>
#include <exception>
#include <optional>
#include <string>

#include "rbg/error.hpp"

namespace rbg::algorithms {

using games::EquilibriumResult;
using games::EquilibriumStatus;
using games::GameModel;
using games::StrategyProfile;
using mathopt::LCPMethod;
using mathopt::LCPOutcome;
using mathopt::LCPStatus;

void SolverOptions::validate() const {
  if (!(deviationEps >= 0.0) || !std::isfinite(deviationEps))
    throw UsageError("SolverOptions: deviation tolerance must be a finite non-negative number");
  if (timeLimitSeconds && !(*timeLimitSeconds > 0.0))
    throw UsageError("SolverOptions: time limit must be positive");
  if (workers < 1) throw UsageError("SolverOptions: worker count must be at least 1");
  if (maxIterations == 0) throw UsageError("SolverOptions: iteration cap must be positive");
}

namespace {

using Clock = std::chrono::steady_clock;

struct Run {
  const GameModel& g;
  const SolverOptions& opts;
  Clock::time_point start = Clock::now();
  mathopt::Deadline deadline;
  EquilibriumResult result;

  bool expired() const { return deadline && Clock::now() >= *deadline; }

  EquilibriumResult finish(EquilibriumStatus status, std::string message = {}) {
    result.status = status;
    result.message = std::move(message);
    result.stats.wallTimeMs =
        std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    if (!result.profile.players.empty())
      result.payoffs = games::profilePayoffs(g, result.profile.barycenters());
    return std::move(result);
  }
};

LCPOutcome solveGameLCP(const mathopt::LCP& lcp, const SolverOptions& opts,
                        const mathopt::Deadline& deadline) {
  mathopt::LCPBudget budget;
  budget.deadline = deadline;
  budget.workers = opts.workers;
  LCPOutcome out = mathopt::solveLCP(lcp, opts.lcp, budget);
  if (opts.lcp == LCPMethod::Lemke && out.status == LCPStatus::Inconclusive) {
    const std::size_t pivots = out.pivots;
    out = mathopt::solveLCP(lcp, LCPMethod::Branching, budget);
    out.pivots += pivots;
  }
  return out;
}

std::vector<SeparationResult> separateAll(const GameModel& g, const std::vector<Vector>& sigma,
                                          const std::vector<PlayerRegion>& regions, int workers) {
  const std::size_t n = g.numPlayers();
  std::vector<SeparationResult> out(n);
  if (workers <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = separationOracle(g.player(i), sigma[i], regions[i]);
    return out;
  }
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for num_threads(workers) schedule(dynamic)
  for (long i = 0; i < static_cast<long>(n); ++i) {
    try {
      out[i] = separationOracle(g.player(i), sigma[i], regions[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

// Re-mixes player i over its support, opponent fixed, so that the opponent's
// support stays optimal. A basic solution is a vertex of the face of i's
// best-response polytope, hence part of an extreme equilibrium. Opponent
// deviations enter as rows from best-response IPs.
std::optional<games::PlayerStrategy> vertexMix(const GameModel& g, const StrategyProfile& s,
                                               std::size_t i, const mathopt::Deadline& deadline) {
  const std::size_t o = 1 - i;
  const auto& own = s.players[i].support;
  const auto& opp = s.players[o].support;
  const std::size_t k = own.size();
  auto opponentCosts = [&](const Vector& q) {
    Vector row(k + 1, 0.0);
    for (std::size_t a = 0; a < k; ++a) row[a] = mathopt::payoff(g.player(o), q, own[a].point);
    return row;
  };

  double big = 1.0;
  std::vector<Vector> tight;
  for (const WeightedPoint& q : opp) {
    tight.push_back(opponentCosts(q.point));
    for (std::size_t a = 0; a < k; ++a) big = std::max(big, 2.0 * std::abs(tight.back()[a]) + 1.0);
  }
  Vector lower(k + 1, 0.0), upper(k + 1, 1.0);
  lower[k] = -big;
  upper[k] = big;
  mathopt::LinearProgram lp = mathopt::LinearProgram::withBounds(lower, upper);
  lp.objective[k] = 1.0;
  Vector simplexRow(k + 1, 1.0);
  simplexRow[k] = 0.0;
  lp.addRow(simplexRow, 1.0, mathopt::RowSense::Equal);
  for (Vector row : tight) {
    row[k] = -1.0;
    lp.addRow(row, 0.0, mathopt::RowSense::Equal);
  }

  for (int round = 0; round < 64; ++round) {
    const mathopt::LPResult r = mathopt::solveLP(lp);
    if (r.status != mathopt::LPStatus::Optimal) return std::nullopt;
    games::PlayerStrategy ps;
    ps.barycenter.assign(own.front().point.size(), 0.0);
    for (std::size_t a = 0; a < k; ++a) {
      if (r.x[a] <= 1e-12) continue;
      ps.support.push_back({r.x[a], own[a].point});
      for (std::size_t j = 0; j < ps.barycenter.size(); ++j)
        ps.barycenter[j] += r.x[a] * own[a].point[j];
    }
    mathopt::IPBudget budget;
    budget.deadline = deadline;
    const mathopt::IPResult br = mathopt::solveIP(g.player(o), ps.barycenter, budget);
    if (br.status != mathopt::IPStatus::Optimal) return std::nullopt;
    if (br.objective >= r.x[k] - 1e-9) return ps;
    Vector row = opponentCosts(br.x);
    for (double& v : row) v = -v;
    row[k] = 1.0;
    lp.addRow(row, 0.0);
  }
  return std::nullopt;
}

std::optional<StrategyProfile> extremeEquilibrium(const GameModel& g, StrategyProfile s,
                                                  const mathopt::Deadline& deadline) {
  for (std::size_t i = 0; i < 2; ++i) {
    if (s.players[i].support.size() < 2) continue;
    auto mix = vertexMix(g, s, i, deadline);
    if (!mix) return std::nullopt;
    s.players[i] = std::move(*mix);
  }
  return s;
}

StrategyProfile lastIterate(const std::vector<Vector>& sigma) {
  StrategyProfile s;
  for (const Vector& x : sigma) s.players.push_back({x, {}});
  return s;
}

}  // namespace

EquilibriumResult cutAndPlay(const GameModel& g, const SolverOptions& opts,
                             const RefinementObserver& observer) {
  opts.validate();
  Run run{g, opts, Clock::now(), {}, {}};
  if (opts.timeLimitSeconds)
    run.deadline = run.start + std::chrono::duration_cast<Clock::duration>(
                                   std::chrono::duration<double>(*opts.timeLimitSeconds));

  // Nonempty feasible sets first; an empty one makes the game infeasible.
  for (std::size_t i = 0; i < g.numPlayers(); ++i) {
    mathopt::IPBudget budget;
    budget.deadline = run.deadline;
    const mathopt::IPResult ip =
        mathopt::solveIP(g.player(i), Vector(g.player(i).numOpponentVariables(), 0.0), budget);
    if (ip.status == mathopt::IPStatus::Infeasible)
      return run.finish(EquilibriumStatus::Infeasible,
                        "player " + std::to_string(i) + " has no feasible strategy");
    if (ip.status == mathopt::IPStatus::BudgetExhausted)
      return run.finish(EquilibriumStatus::TimeLimit, "time limit reached before the first iteration");
  }

  std::vector<PlayerRegion> regions;
  for (const auto& p : g.players()) regions.push_back(PlayerRegion::initial(p));

  std::vector<Vector> sigma;
  try {
    while (run.result.stats.iterations < opts.maxIterations) {
      if (run.expired()) {
        run.result.profile = lastIterate(sigma);
        return run.finish(EquilibriumStatus::TimeLimit, "time limit reached");
      }
      ++run.result.stats.iterations;

      std::vector<mathopt::ExtendedHull> hulls;
      for (const PlayerRegion& r : regions) hulls.push_back(r.hull());
      const games::NashLCP nash = games::buildNashLCP(g, hulls);
      const LCPOutcome lcp = solveGameLCP(nash.lcp, opts, run.deadline);
      run.result.stats.lcpNodes += lcp.nodes;
      if (lcp.status == LCPStatus::BudgetExhausted) {
        run.result.profile = lastIterate(sigma);
        return run.finish(EquilibriumStatus::TimeLimit, "time limit reached in the LCP solve");
      }
      if (lcp.status == LCPStatus::NoSolution)
        return run.finish(EquilibriumStatus::NoEquilibriumFound,
                          "the relaxed game has no equilibrium");
      if (lcp.status != LCPStatus::Solved)
        return run.finish(EquilibriumStatus::NumericalFailure, "LCP solve was inconclusive");

      sigma = nash.extractProfile(lcp.solution->z);
      const std::vector<SeparationResult> sep = separateAll(g, sigma, regions, opts.workers);

      bool allMembers = true;
      for (const SeparationResult& s : sep) allMembers = allMembers && s.kind == SeparationKind::Member;
      if (allMembers) {
        StrategyProfile profile;
        for (const SeparationResult& s : sep) {
          games::PlayerStrategy ps;
          ps.barycenter.assign(s.support.front().point.size(), 0.0);
          for (const WeightedPoint& wp : s.support)
            for (std::size_t j = 0; j < wp.point.size(); ++j)
              ps.barycenter[j] += wp.weight * wp.point[j];
          ps.support = s.support;
          profile.players.push_back(std::move(ps));
        }
        const auto devs =
            games::deviationCheck(g, profile, opts.deviationEps, opts.workers, run.deadline);
        if (!devs.empty()) {
          run.result.profile = std::move(profile);
          return run.finish(EquilibriumStatus::NumericalFailure,
                            "player " + std::to_string(devs.front().player) +
                                " can deviate from a certified profile by " +
                                std::to_string(devs.front().improvement));
        }
        if (g.numPlayers() == 2) {
          auto extreme = extremeEquilibrium(g, profile, run.deadline);
          if (extreme &&
              games::deviationCheck(g, *extreme, opts.deviationEps, opts.workers, run.deadline).empty())
            profile = std::move(*extreme);
        }
        run.result.profile = std::move(profile);
        bool pure = true;
        for (const auto& ps : run.result.profile.players) pure = pure && ps.support.size() == 1;
        return run.finish(pure ? EquilibriumStatus::PNE : EquilibriumStatus::MNE);
      }

      for (std::size_t i = 0; i < g.numPlayers(); ++i) {
        if (sep[i].kind == SeparationKind::Cuts) run.result.stats.cuts += sep[i].cuts.size();
        if (sep[i].kind == SeparationKind::Branch) ++run.result.stats.branches;
        if (!refineRegion(regions[i], sep[i]))
          return run.finish(EquilibriumStatus::Infeasible,
                            "player " + std::to_string(i) + " has no feasible strategy");
      }
      if (observer) observer(run.result.stats.iterations, regions);
    }
  } catch (const BudgetExhausted&) {
    run.result.profile = lastIterate(sigma);
    return run.finish(EquilibriumStatus::TimeLimit, "time limit reached");
  } catch (const PlayerInfeasible& e) {
    return run.finish(EquilibriumStatus::Infeasible, e.what());
  } catch (const NumericalFailure& e) {
    return run.finish(EquilibriumStatus::NumericalFailure, e.what());
  }
  run.result.profile = lastIterate(sigma);
  return run.finish(EquilibriumStatus::NumericalFailure,
                    "iteration cap of " + std::to_string(opts.maxIterations) + " reached");
}

}  // namespace rbg::algorithms
