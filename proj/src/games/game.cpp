#include "rbg/games/game.hpp"

#include <omp.h>

#include <cmath>
#include <exception>
#include <string>

#include "rbg/error.hpp"

namespace rbg::games {

using mathopt::ExtendedHull;
using mathopt::IPResult;
using mathopt::IPStatus;
using mathopt::Polyhedron;

GameModel::GameModel(std::vector<PlayerProgram> players) : players_(std::move(players)) {
  if (players_.empty()) throw UsageError("GameModel: at least one player is required");
  offsets_.assign(players_.size() + 1, 0);
  for (std::size_t i = 0; i < players_.size(); ++i)
    offsets_[i + 1] = offsets_[i] + players_[i].numVariables();
  for (std::size_t i = 0; i < players_.size(); ++i) {
    const std::size_t expected = offsets_.back() - players_[i].numVariables();
    if (players_[i].numOpponentVariables() != expected)
      throw UsageError("GameModel: player " + std::to_string(i) + " has " +
                       std::to_string(players_[i].numOpponentVariables()) +
                       " cross-term rows, expected " + std::to_string(expected));
  }
}

StrategyProfile StrategyProfile::pure(const std::vector<Vector>& points) {
  StrategyProfile p;
  for (const Vector& x : points) p.players.push_back({x, {WeightedPoint{1.0, x}}});
  return p;
}

std::vector<Vector> StrategyProfile::barycenters() const {
  std::vector<Vector> out;
  out.reserve(players.size());
  for (const PlayerStrategy& s : players) out.push_back(s.barycenter);
  return out;
}

bool StrategyProfile::isPure(double eps) const {
  for (const PlayerStrategy& s : players) {
    if (s.support.size() != 1) return false;
    for (double v : s.support.front().point)
      if (std::abs(v - std::round(v)) > eps) return false;
  }
  return true;
}

std::string toString(EquilibriumStatus s) {
  switch (s) {
    case EquilibriumStatus::PNE: return "PNE";
    case EquilibriumStatus::MNE: return "MNE";
    case EquilibriumStatus::NoEquilibriumFound: return "NoEquilibriumFound";
    case EquilibriumStatus::TimeLimit: return "TimeLimit";
    case EquilibriumStatus::Infeasible: return "Infeasible";
    case EquilibriumStatus::NumericalFailure: return "NumericalFailure";
  }
  return "NumericalFailure";
}

std::optional<EquilibriumStatus> statusFromString(const std::string& s) {
  for (EquilibriumStatus v :
       {EquilibriumStatus::PNE, EquilibriumStatus::MNE, EquilibriumStatus::NoEquilibriumFound,
        EquilibriumStatus::TimeLimit, EquilibriumStatus::Infeasible,
        EquilibriumStatus::NumericalFailure})
    if (toString(v) == s) return v;
  return std::nullopt;
}

namespace {

void checkProfile(const GameModel& g, const std::vector<Vector>& sigma) {
  if (sigma.size() != g.numPlayers())
    throw UsageError("profile has " + std::to_string(sigma.size()) + " players, game has " +
                     std::to_string(g.numPlayers()));
  for (std::size_t i = 0; i < sigma.size(); ++i)
    if (sigma[i].size() != g.numVariables(i))
      throw UsageError("profile entry " + std::to_string(i) + " has wrong length");
}

std::optional<Deviation> checkPlayer(const GameModel& g, const std::vector<Vector>& sigma,
                                     std::size_t i, double eps, const mathopt::Deadline& deadline) {
  const Vector opp = opponentsVector(g, sigma, i);
  mathopt::IPBudget budget;
  budget.deadline = deadline;
  const IPResult best = mathopt::solveIP(g.player(i), opp, budget);
  if (best.status == IPStatus::Infeasible)
    throw PlayerInfeasible(i, "player " + std::to_string(i) + " has no feasible strategy");
  if (best.status == IPStatus::BudgetExhausted)
    throw BudgetExhausted("deviation check for player " + std::to_string(i) + " ran out of time");
  if (best.status == IPStatus::Unbounded)
    throw UsageError("player " + std::to_string(i) + " has an unbounded best response");
  const double current = mathopt::payoff(g.player(i), sigma[i], opp);
  const double gain = current - best.objective;
  if (gain > eps) return Deviation{i, best.x, gain};
  return std::nullopt;
}

}  // namespace

Vector opponentsVector(const GameModel& g, const std::vector<Vector>& sigma, std::size_t i) {
  if (i >= g.numPlayers()) throw UsageError("opponentsVector: player index out of range");
  Vector out;
  out.reserve(g.totalVariables() - g.numVariables(i));
  for (std::size_t j = 0; j < sigma.size(); ++j)
    if (j != i) out.insert(out.end(), sigma[j].begin(), sigma[j].end());
  return out;
}

Vector profilePayoffs(const GameModel& g, const std::vector<Vector>& sigma) {
  checkProfile(g, sigma);
  Vector out(g.numPlayers());
  for (std::size_t i = 0; i < g.numPlayers(); ++i)
    out[i] = mathopt::payoff(g.player(i), sigma[i], opponentsVector(g, sigma, i));
  return out;
}

std::vector<Deviation> deviationCheckSerial(const GameModel& g, const StrategyProfile& profile,
                                            double eps, const mathopt::Deadline& deadline) {
  const std::vector<Vector> sigma = profile.barycenters();
  checkProfile(g, sigma);
  std::vector<Deviation> out;
  for (std::size_t i = 0; i < g.numPlayers(); ++i)
    if (auto d = checkPlayer(g, sigma, i, eps, deadline)) out.push_back(std::move(*d));
  return out;
}

std::vector<Deviation> deviationCheck(const GameModel& g, const StrategyProfile& profile,
                                      double eps, int workers, const mathopt::Deadline& deadline) {
  if (workers <= 1 || g.numPlayers() == 1) return deviationCheckSerial(g, profile, eps, deadline);
  const std::vector<Vector> sigma = profile.barycenters();
  checkProfile(g, sigma);
  const long n = static_cast<long>(g.numPlayers());
  std::vector<std::optional<Deviation>> found(g.numPlayers());
  std::vector<std::exception_ptr> errors(g.numPlayers());
#pragma omp parallel for num_threads(workers) schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      found[i] = checkPlayer(g, sigma, static_cast<std::size_t>(i), eps, deadline);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<Deviation> out;
  for (auto& d : found)
    if (d) out.push_back(std::move(*d));
  return out;
}

namespace {

// Lifted description of one region: u = (v^1, lambda_1, v^2, lambda_2, ...)
// where v^k holds the offsets of piece k's copy from lambda_k * lower_k on
// coordinates that are not fixed.
struct LiftedRegion {
  DenseMatrix T;
  DenseMatrix G;
  Vector h;
};

LiftedRegion liftRegion(const ExtendedHull& hull, std::size_t m) {
  if (hull.dimension() != m || hull.pieceDimension() != m)
    throw UsageError("buildNashLCP: region dimension differs from the player's variable count");
  const auto& pieces = hull.pieces();
  std::vector<std::vector<std::size_t>> freeCoords(pieces.size());
  std::vector<std::size_t> start(pieces.size());
  std::size_t width = 0;
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    for (std::size_t j = 0; j < m; ++j)
      if (pieces[k].upper[j] > pieces[k].lower[j]) freeCoords[k].push_back(j);
    start[k] = width;
    width += freeCoords[k].size() + 1;
  }

  LiftedRegion out{DenseMatrix(m, width), DenseMatrix(0, width), {}};
  Vector row(width);
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const Polyhedron& piece = pieces[k];
    const auto& F = freeCoords[k];
    const std::size_t lambda = start[k] + F.size();
    for (std::size_t j = 0; j < m; ++j) out.T(j, lambda) = piece.lower[j];
    for (std::size_t f = 0; f < F.size(); ++f) out.T(F[f], start[k] + f) = 1.0;

    for (std::size_t r = 0; r < piece.numRows(); ++r) {
      std::fill(row.begin(), row.end(), 0.0);
      auto a = piece.A.row(r);
      double atLower = 0.0;
      for (std::size_t j = 0; j < m; ++j) atLower += a[j] * piece.lower[j];
      for (std::size_t f = 0; f < F.size(); ++f) row[start[k] + f] = a[F[f]];
      row[lambda] = atLower - piece.b[r];
      out.G.appendRow(row);
      out.h.push_back(0.0);
    }
    for (std::size_t f = 0; f < F.size(); ++f) {
      std::fill(row.begin(), row.end(), 0.0);
      row[start[k] + f] = 1.0;
      row[lambda] = -(piece.upper[F[f]] - piece.lower[F[f]]);
      out.G.appendRow(row);
      out.h.push_back(0.0);
    }
  }
  std::fill(row.begin(), row.end(), 0.0);
  for (std::size_t k = 0; k < pieces.size(); ++k) row[start[k] + freeCoords[k].size()] = 1.0;
  out.G.appendRow(row);
  out.h.push_back(1.0);
  out.G.appendRow(scale(row, -1.0));
  out.h.push_back(-1.0);
  return out;
}

}  // namespace

NashLCP buildNashLCP(const GameModel& g, const std::vector<ExtendedHull>& regions) {
  const std::size_t n = g.numPlayers();
  if (regions.size() != n) throw UsageError("buildNashLCP: one region per player is required");
  std::vector<LiftedRegion> lifted;
  lifted.reserve(n);
  for (std::size_t i = 0; i < n; ++i) lifted.push_back(liftRegion(regions[i], g.numVariables(i)));

  NashLCP out;
  out.blocks.resize(n);
  std::size_t size = 0;
  for (std::size_t i = 0; i < n; ++i) {
    out.blocks[i].uOffset = size;
    out.blocks[i].uSize = lifted[i].T.cols();
    out.blocks[i].T = lifted[i].T;
    size += lifted[i].T.cols();
  }
  for (std::size_t i = 0; i < n; ++i) {
    out.blocks[i].muOffset = size;
    out.blocks[i].muSize = lifted[i].h.size();
    size += lifted[i].h.size();
  }
  DenseMatrix M(size, size);
  Vector q(size, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    const NashLCP::Block& bi = out.blocks[i];
    const LiftedRegion& li = lifted[i];
    const PlayerProgram& p = g.player(i);
    const std::size_t mi = p.numVariables();

    const Vector tc = li.T.multiplyTransposed(p.cost());
    for (std::size_t a = 0; a < bi.uSize; ++a) q[bi.uOffset + a] = tc[a];
    for (std::size_t r = 0; r < bi.muSize; ++r) {
      q[bi.muOffset + r] = li.h[r];
      for (std::size_t a = 0; a < bi.uSize; ++a) {
        M(bi.uOffset + a, bi.muOffset + r) = li.G(r, a);
        M(bi.muOffset + r, bi.uOffset + a) = -li.G(r, a);
      }
    }

    // Cross blocks: T^iT (C^i_[j])T T^j, with C^i_[j] the rows of C^i that
    // multiply x^j.
    std::size_t oppRow = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const std::size_t mj = g.numVariables(j);
      DenseMatrix D(mi, mj);
      bool any = false;
      for (const Triplet& t : p.cross().entries()) {
        if (t.row < oppRow || t.row >= oppRow + mj) continue;
        D(t.col, t.row - oppRow) = t.value;
        any = true;
      }
      oppRow += mj;
      if (!any) continue;
      const NashLCP::Block& bj = out.blocks[j];
      // DT = D * T^j  (mi x uSize_j)
      DenseMatrix DT(mi, bj.uSize);
      for (std::size_t r = 0; r < mi; ++r)
        for (std::size_t c = 0; c < mj; ++c) {
          const double d = D(r, c);
          if (d == 0.0) continue;
          for (std::size_t b = 0; b < bj.uSize; ++b) DT(r, b) += d * bj.T(c, b);
        }
      for (std::size_t a = 0; a < bi.uSize; ++a)
        for (std::size_t b = 0; b < bj.uSize; ++b) {
          double s = 0.0;
          for (std::size_t r = 0; r < mi; ++r) s += li.T(r, a) * DT(r, b);
          M(bi.uOffset + a, bj.uOffset + b) = s;
        }
    }
  }
  out.lcp = mathopt::LCP{std::move(M), std::move(q)};
  return out;
}

std::vector<Vector> NashLCP::extractProfile(std::span<const double> z) const {
  if (z.size() != lcp.size()) throw UsageError("NashLCP::extractProfile: z has wrong length");
  std::vector<Vector> out;
  out.reserve(blocks.size());
  for (const Block& b : blocks) out.push_back(b.T.multiply(z.subspan(b.uOffset, b.uSize)));
  return out;
}

}  // namespace rbg::games
