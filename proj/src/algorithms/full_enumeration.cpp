#include "rbg/algorithms/full_enumeration.hpp"

#include <omp.h>

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <string>

#include "rbg/error.hpp"

namespace rbg::algorithms {

using games::EquilibriumResult;
using games::EquilibriumStatus;
using games::GameModel;

namespace {

constexpr double kLabelTol = 1e-9;

using Clock = std::chrono::steady_clock;

bool passed(const mathopt::Deadline& d) { return d && Clock::now() >= *d; }

// C(n, k) saturating at `cap + 1`.
std::size_t binomial(std::size_t n, std::size_t k, std::size_t cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  double v = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    v = v * static_cast<double>(n - k + i) / static_cast<double>(i);
    if (v > static_cast<double>(cap)) return cap + 1;
  }
  return static_cast<std::size_t>(std::llround(v));
}

std::vector<std::size_t> radixDigits(std::size_t index, const std::vector<std::size_t>& sizes) {
  std::vector<std::size_t> d(sizes.size());
  for (std::size_t i = sizes.size(); i-- > 0;) {
    d[i] = index % sizes[i];
    index /= sizes[i];
  }
  return d;
}

bool isPureEquilibrium(const GameModel& g, const std::vector<std::vector<Vector>>& strategies,
                       const std::vector<std::size_t>& pick, double eps) {
  std::vector<Vector> sigma(pick.size());
  for (std::size_t i = 0; i < pick.size(); ++i) sigma[i] = strategies[i][pick[i]];
  for (std::size_t i = 0; i < pick.size(); ++i) {
    const Vector cost = mathopt::parametrizedObjective(g.player(i), games::opponentsVector(g, sigma, i));
    const double current = dot(cost, sigma[i]);
    double best = current;
    for (const Vector& s : strategies[i]) best = std::min(best, dot(cost, s));
    if (current - best > eps + kLabelTol * (1.0 + std::abs(best))) return false;
  }
  return true;
}

std::vector<std::size_t> profileSizes(const std::vector<std::vector<Vector>>& strategies) {
  std::vector<std::size_t> sizes;
  std::size_t total = 1;
  for (const auto& s : strategies) {
    sizes.push_back(s.size());
    if (s.empty()) return sizes;
    if (total > kMaxPureProfiles / s.size())
      throw BudgetExhausted("fullEnumeration: more than " + std::to_string(kMaxPureProfiles) +
                            " pure profiles");
    total *= s.size();
  }
  return sizes;
}

std::size_t product(const std::vector<std::size_t>& sizes) {
  std::size_t total = 1;
  for (std::size_t s : sizes) total *= s;
  return total;
}

// Vertex of {(y, v) : y >= 0, sum y = 1, (A y)_i >= v} with its labels:
// rows 0..rows-1 for tight A rows, rows + j for y_j = 0.
struct LabeledVertex {
  Vector point;
  std::vector<bool> labels;
};

std::vector<LabeledVertex> bestResponseVertices(const DenseMatrix& A) {
  const std::size_t rows = A.rows(), cols = A.cols();
  if (binomial(rows + cols, cols, kMaxVertexSystems) > kMaxVertexSystems)
    throw BudgetExhausted("fullEnumeration: too many support systems for mixed enumeration");
  std::vector<LabeledVertex> out;
  std::vector<std::size_t> pick(cols);
  for (std::size_t k = 0; k < cols; ++k) pick[k] = k;
  const std::size_t unknowns = cols + 1;
  Eigen::MatrixXd system(unknowns, unknowns);
  Eigen::VectorXd rhs(unknowns);
  while (true) {
    system.setZero();
    rhs.setZero();
    for (std::size_t e = 0; e < cols; ++e) {
      const std::size_t label = pick[e];
      if (label < rows) {
        for (std::size_t j = 0; j < cols; ++j) system(e, j) = A(label, j);
        system(e, cols) = -1.0;
      } else {
        system(e, label - rows) = 1.0;
      }
    }
    for (std::size_t j = 0; j < cols; ++j) system(cols, j) = 1.0;
    rhs(cols) = 1.0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
    if (lu.rank() == static_cast<long>(unknowns)) {
      const Eigen::VectorXd sol = lu.solve(rhs);
      Vector y(cols);
      bool ok = true;
      for (std::size_t j = 0; j < cols; ++j) {
        y[j] = sol(j);
        if (y[j] < -kLabelTol) ok = false;
        if (y[j] < kLabelTol) y[j] = 0.0;
      }
      const double v = sol(cols);
      const Vector ay = A.multiply(y);
      for (std::size_t i = 0; i < rows && ok; ++i)
        if (ay[i] < v - kLabelTol * (1.0 + std::abs(v))) ok = false;
      if (ok) {
        bool duplicate = false;
        for (const LabeledVertex& lv : out)
          duplicate = duplicate || normInf(subtract(lv.point, y)) <= kLabelTol;
        if (!duplicate) {
          LabeledVertex lv{y, std::vector<bool>(rows + cols, false)};
          for (std::size_t i = 0; i < rows; ++i)
            lv.labels[i] = std::abs(ay[i] - v) <= kLabelTol * (1.0 + std::abs(v));
          for (std::size_t j = 0; j < cols; ++j) lv.labels[rows + j] = y[j] == 0.0;
          out.push_back(std::move(lv));
        }
      }
    }
    // Next combination of `cols` labels out of rows + cols.
    std::size_t k = cols;
    while (k > 0 && pick[k - 1] == rows + k - 1) --k;
    if (k == 0) break;
    ++pick[k - 1];
    for (std::size_t e = k; e < cols; ++e) pick[e] = pick[e - 1] + 1;
  }
  return out;
}

EquilibriumResult makeResult(const GameModel& g, std::vector<games::PlayerStrategy> players) {
  EquilibriumResult r;
  r.profile.players = std::move(players);
  bool pure = true;
  for (const auto& ps : r.profile.players) pure = pure && ps.support.size() == 1;
  r.status = pure ? EquilibriumStatus::PNE : EquilibriumStatus::MNE;
  r.payoffs = games::profilePayoffs(g, r.profile.barycenters());
  return r;
}

games::PlayerStrategy mixedStrategy(const std::vector<Vector>& strategies, const Vector& probs) {
  games::PlayerStrategy ps;
  ps.barycenter.assign(strategies.front().size(), 0.0);
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] <= 0.0) continue;
    ps.support.push_back({probs[k], strategies[k]});
    for (std::size_t j = 0; j < ps.barycenter.size(); ++j)
      ps.barycenter[j] += probs[k] * strategies[k][j];
  }
  return ps;
}

}  // namespace

std::vector<Vector> enumerateStrategies(const mathopt::PlayerProgram& p, std::size_t limit) {
  const std::size_t m = p.numVariables();
  std::vector<std::size_t> counts(m);
  std::size_t lattice = 1;
  for (std::size_t j = 0; j < m; ++j) {
    if (!p.isInteger(j)) throw UsageError("fullEnumeration: every variable must be integer");
    const auto& b = p.bounds()[j];
    const double lo = std::ceil(b.lower), hi = std::floor(b.upper);
    counts[j] = hi >= lo ? static_cast<std::size_t>(hi - lo) + 1 : 0;
    if (counts[j] == 0) return {};
    if (lattice > limit / counts[j])
      throw BudgetExhausted("fullEnumeration: more than " + std::to_string(limit) +
                            " lattice points for one player");
    lattice *= counts[j];
  }
  std::vector<Vector> out;
  Vector x(m);
  for (std::size_t idx = 0; idx < lattice; ++idx) {
    const auto d = radixDigits(idx, counts);
    for (std::size_t j = 0; j < m; ++j) x[j] = std::ceil(p.bounds()[j].lower) + static_cast<double>(d[j]);
    if (p.isFeasible(x, 0.0)) out.push_back(x);
  }
  return out;
}

std::vector<std::vector<std::size_t>> pureEquilibriaSerial(
    const GameModel& g, const std::vector<std::vector<Vector>>& strategies, double eps) {
  const auto sizes = profileSizes(strategies);
  const std::size_t total = product(sizes);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t idx = 0; idx < total; ++idx) {
    auto pick = radixDigits(idx, sizes);
    if (isPureEquilibrium(g, strategies, pick, eps)) out.push_back(std::move(pick));
  }
  return out;
}

std::vector<std::vector<std::size_t>> pureEquilibria(
    const GameModel& g, const std::vector<std::vector<Vector>>& strategies, double eps,
    int workers) {
  if (workers <= 1) return pureEquilibriaSerial(g, strategies, eps);
  const auto sizes = profileSizes(strategies);
  const long total = static_cast<long>(product(sizes));
  std::vector<char> flags(static_cast<std::size_t>(total), 0);
#pragma omp parallel for num_threads(workers) schedule(static)
  for (long idx = 0; idx < total; ++idx)
    flags[idx] = isPureEquilibrium(g, strategies, radixDigits(static_cast<std::size_t>(idx), sizes), eps);
  std::vector<std::vector<std::size_t>> out;
  for (long idx = 0; idx < total; ++idx)
    if (flags[idx]) out.push_back(radixDigits(static_cast<std::size_t>(idx), sizes));
  return out;
}

std::vector<BimatrixEquilibrium> bimatrixEquilibria(const DenseMatrix& A, const DenseMatrix& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols() || A.rows() == 0 || A.cols() == 0)
    throw UsageError("bimatrixEquilibria: cost matrices must share a nonzero shape");
  const std::size_t rows = A.rows(), cols = A.cols();
  // Column player's mixed strategies y with the row player's labels, and row
  // player's mixed strategies x with the column player's labels.
  const auto ys = bestResponseVertices(A);
  const auto xs = bestResponseVertices(B.transposed());
  std::vector<BimatrixEquilibrium> out;
  for (const LabeledVertex& xv : xs) {
    for (const LabeledVertex& yv : ys) {
      bool complete = true;
      // Row i: x_i = 0 (label cols + i of xv) or row i a best response to y.
      for (std::size_t i = 0; i < rows && complete; ++i)
        complete = xv.labels[cols + i] || yv.labels[i];
      for (std::size_t j = 0; j < cols && complete; ++j)
        complete = yv.labels[rows + j] || xv.labels[j];
      if (complete) out.push_back({xv.point, yv.point});
    }
  }
  return out;
}

std::vector<EquilibriumResult> fullEnumeration(const GameModel& g, const SolverOptions& opts) {
  opts.validate();
  const auto start = Clock::now();
  mathopt::Deadline deadline;
  if (opts.timeLimitSeconds)
    deadline = start + std::chrono::duration_cast<Clock::duration>(
                           std::chrono::duration<double>(*opts.timeLimitSeconds));
  auto stamp = [&](std::vector<EquilibriumResult>& results) {
    const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    for (EquilibriumResult& r : results) r.stats.wallTimeMs = ms;
  };
  auto timeLimit = [&] {
    std::vector<EquilibriumResult> r(1);
    r[0].status = EquilibriumStatus::TimeLimit;
    r[0].message = "time limit reached";
    stamp(r);
    return r;
  };

  std::vector<std::vector<Vector>> strategies;
  for (std::size_t i = 0; i < g.numPlayers(); ++i) {
    strategies.push_back(enumerateStrategies(g.player(i), kMaxPureProfiles));
    if (strategies.back().empty())
      throw PlayerInfeasible(i, "player " + std::to_string(i) + " has no feasible strategy");
    if (passed(deadline)) return timeLimit();
  }

  std::vector<EquilibriumResult> results;
  for (const auto& pick : pureEquilibria(g, strategies, 0.0, opts.workers)) {
    std::vector<games::PlayerStrategy> players;
    for (std::size_t i = 0; i < pick.size(); ++i) {
      const Vector& x = strategies[i][pick[i]];
      players.push_back({x, {{1.0, x}}});
    }
    results.push_back(makeResult(g, std::move(players)));
  }
  if (passed(deadline)) return timeLimit();

  if (g.numPlayers() == 2) {
    const std::size_t rows = strategies[0].size(), cols = strategies[1].size();
    DenseMatrix A(rows, cols), B(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) {
        A(r, c) = mathopt::payoff(g.player(0), strategies[0][r], strategies[1][c]);
        B(r, c) = mathopt::payoff(g.player(1), strategies[1][c], strategies[0][r]);
      }
    for (const BimatrixEquilibrium& eq : bimatrixEquilibria(A, B)) {
      std::vector<games::PlayerStrategy> players{mixedStrategy(strategies[0], eq.x),
                                                 mixedStrategy(strategies[1], eq.y)};
      if (players[0].support.size() == 1 && players[1].support.size() == 1) continue;
      bool seen = false;
      for (const EquilibriumResult& r : results) {
        bool same = true;
        for (std::size_t i = 0; i < 2; ++i)
          same = same && normInf(subtract(r.profile.players[i].barycenter, players[i].barycenter)) <= 1e-9;
        seen = seen || same;
      }
      if (!seen) results.push_back(makeResult(g, std::move(players)));
    }
    if (passed(deadline)) return timeLimit();
  }
  stamp(results);
  return results;
}

}  // namespace rbg::algorithms
