#include "rbg/mathopt/lcp.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "rbg/error.hpp"

namespace rbg::mathopt {

void LCP::validate() const {
  if (M.rows() != M.cols()) throw UsageError("LCP: M must be square");
  if (M.rows() != q.size()) throw UsageError("LCP: q length differs from M");
  requireFinite(q, "LCP q");
  for (std::size_t r = 0; r < M.rows(); ++r) requireFinite(M.row(r), "LCP M");
}

Vector LCP::residual(std::span<const double> z) const { return add(M.multiply(z), q); }

bool satisfiesLCP(const LCP& lcp, std::span<const double> z, double eps) {
  const Vector w = lcp.residual(z);
  double gap = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (z[j] < -eps || w[j] < -eps) return false;
    gap += z[j] * w[j];
  }
  return gap <= static_cast<double>(z.size()) * eps;
}

namespace {

constexpr double kComplementarityTol = 1e-9;

// Bound on every z in node programs. Subsystems that are feasible only beyond it
// are nearly parallel in floating point and treated as infeasible.
double multiplierCap(const LCP& lcp) {
  double scale = normInf(lcp.q);
  for (std::size_t r = 0; r < lcp.M.rows(); ++r) scale = std::max(scale, normInf(lcp.M.row(r)));
  return 1e6 * (1.0 + scale);
}

LinearProgram nodeProgram(const LCP& lcp, std::span<const Fixing> fixings, bool withObjective) {
  const std::size_t n = lcp.size();
  LinearProgram lp;
  lp.objective.assign(n, 0.0);
  lp.lower.assign(n, 0.0);
  lp.upper.assign(n, multiplierCap(lcp));
  lp.constraints = DenseMatrix(0, n);
  Vector row(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (fixings[j] == Fixing::ZVarZero) lp.upper[j] = 0.0;
    auto mrow = lcp.M.row(j);
    if (fixings[j] == Fixing::WZero) {
      lp.addRow(mrow, -lcp.q[j], RowSense::Equal);
    } else {
      for (std::size_t k = 0; k < n; ++k) row[k] = -mrow[k];
      lp.addRow(row, lcp.q[j]);
    }
    if (withObjective && fixings[j] == Fixing::Free) {
      lp.objective[j] += 1.0;
      for (std::size_t k = 0; k < n; ++k) lp.objective[k] += mrow[k];
    }
  }
  return lp;
}

// Index with the largest |z_j w_j| among free indexes that are not yet
// complementary; -1 if the point is complementary.
long branchingIndex(const LCPPoint& p, std::span<const Fixing> fixings) {
  long best = -1;
  double bestViolation = -1.0;
  for (std::size_t j = 0; j < p.z.size(); ++j) {
    if (fixings[j] != Fixing::Free) continue;
    if (std::min(p.z[j], p.w[j]) <= kComplementarityTol) continue;
    const double v = std::abs(p.z[j] * p.w[j]);
    if (v > bestViolation) {
      bestViolation = v;
      best = static_cast<long>(j);
    }
  }
  return best;
}

constexpr double kAcceptTol = 1e-7;

long firstFree(std::span<const Fixing> fixings) {
  for (std::size_t j = 0; j < fixings.size(); ++j)
    if (fixings[j] == Fixing::Free) return static_cast<long>(j);
  return -1;
}

// Re-solves with every index fixed to its (near-)zero side for an exactly
// complementary point with the smallest sum of z. Points that still miss the
// complementarity test sit on a numerical ray and are rejected.
std::optional<LCPSolution> polish(const LCP& lcp, const LCPPoint& p) {
  std::vector<Fixing> fix(p.z.size());
  for (std::size_t j = 0; j < fix.size(); ++j)
    fix[j] = p.z[j] <= p.w[j] ? Fixing::ZVarZero : Fixing::WZero;
  LinearProgram lp = nodeProgram(lcp, fix, false);
  lp.objective.assign(lcp.size(), 1.0);
  const LPResult res = solveLP(lp);
  if (res.status == LPStatus::Optimal && satisfiesLCP(lcp, res.x, kAcceptTol)) {
    LCPSolution sol{res.x, lcp.residual(res.x), LCPMethod::Branching};
    for (std::size_t j = 0; j < fix.size(); ++j)
      if (fix[j] == Fixing::WZero) sol.w[j] = 0.0;
    return sol;
  }
  if (satisfiesLCP(lcp, p.z, kAcceptTol)) return LCPSolution{p.z, p.w, LCPMethod::Branching};
  return std::nullopt;
}

bool deadlinePassed(const Deadline& d) {
  return d && std::chrono::steady_clock::now() >= *d;
}

enum class SearchEnd { Found, Exhausted, Budget, Cancelled };

struct SearchResult {
  SearchEnd end = SearchEnd::Exhausted;
  std::optional<LCPSolution> solution;
};

// Depth-first search below `root`. `nodes` is shared between workers.
SearchResult depthFirst(const LCP& lcp, std::vector<Fixing> root, const LCPBudget& budget,
                        std::atomic<std::size_t>& nodes, const std::function<bool()>& cancelled) {
  std::vector<std::vector<Fixing>> stack;
  stack.push_back(std::move(root));
  while (!stack.empty()) {
    if (cancelled && cancelled()) return {SearchEnd::Cancelled, {}};
    const std::size_t visited = nodes.fetch_add(1) + 1;
    if ((budget.maxNodes != 0 && visited > budget.maxNodes) || deadlinePassed(budget.deadline))
      return {SearchEnd::Budget, {}};
    std::vector<Fixing> fix = std::move(stack.back());
    stack.pop_back();
    auto point = solveLCPWithFixings(lcp, fix);
    if (!point) continue;
    long j = branchingIndex(*point, fix);
    if (j < 0) {
      if (auto sol = polish(lcp, *point)) return {SearchEnd::Found, std::move(sol)};
      j = firstFree(fix);
      if (j < 0) continue;
    }
    std::vector<Fixing> second = fix;
    second[static_cast<std::size_t>(j)] = Fixing::WZero;
    fix[static_cast<std::size_t>(j)] = Fixing::ZVarZero;
    stack.push_back(std::move(second));
    stack.push_back(std::move(fix));
  }
  return {SearchEnd::Exhausted, {}};
}

LCPOutcome trivialOutcome(const LCP& lcp) {
  LCPOutcome out;
  out.status = LCPStatus::Solved;
  out.solution = LCPSolution{Vector(lcp.size(), 0.0), lcp.q, LCPMethod::Branching};
  return out;
}

bool nonnegative(const Vector& q) {
  return std::all_of(q.begin(), q.end(), [](double v) { return v >= 0.0; });
}

}  // namespace

std::optional<LCPPoint> solveLCPWithFixings(const LCP& lcp, std::span<const Fixing> fixings) {
  if (fixings.size() != lcp.size()) throw UsageError("solveLCPWithFixings: fixings length mismatch");
  LPResult res = solveLP(nodeProgram(lcp, fixings, true));
  if (res.status == LPStatus::Unbounded) res = solveLP(nodeProgram(lcp, fixings, false));
  if (res.status != LPStatus::Optimal) return std::nullopt;
  LCPPoint p;
  p.z = std::move(res.x);
  p.w = lcp.residual(p.z);
  for (std::size_t j = 0; j < fixings.size(); ++j)
    if (fixings[j] == Fixing::WZero) p.w[j] = 0.0;
  return p;
}

LCPOutcome solveLCPBranchingSerial(const LCP& lcp, const LCPBudget& budget) {
  lcp.validate();
  if (nonnegative(lcp.q)) return trivialOutcome(lcp);
  std::atomic<std::size_t> nodes{0};
  SearchResult r = depthFirst(lcp, std::vector<Fixing>(lcp.size(), Fixing::Free), budget, nodes, {});
  LCPOutcome out;
  out.nodes = nodes.load();
  switch (r.end) {
    case SearchEnd::Found:
      out.status = LCPStatus::Solved;
      out.solution = std::move(r.solution);
      break;
    case SearchEnd::Budget:
      out.status = LCPStatus::BudgetExhausted;
      break;
    default:
      out.status = LCPStatus::NoSolution;
  }
  return out;
}

LCPOutcome solveLCPBranchingParallel(const LCP& lcp, const LCPBudget& budget) {
  lcp.validate();
  if (nonnegative(lcp.q)) return trivialOutcome(lcp);
  const int workers = std::max(1, budget.workers);

  // Frontier in depth-first preorder; each entry is either an open subtree or
  // a node whose relaxation is already complementary.
  struct Entry {
    std::vector<Fixing> fixings;
    std::optional<LCPSolution> solution;
  };
  std::vector<Entry> frontier;
  std::atomic<std::size_t> nodes{0};
  int depthLimit = 0;
  while ((1 << depthLimit) < 4 * workers) ++depthLimit;

  bool budgetHit = false;
  std::function<void(std::vector<Fixing>, int)> expand = [&](std::vector<Fixing> fix, int depth) {
    if (budgetHit) return;
    if (depth == depthLimit) {
      frontier.push_back({std::move(fix), std::nullopt});
      return;
    }
    const std::size_t visited = nodes.fetch_add(1) + 1;
    if ((budget.maxNodes != 0 && visited > budget.maxNodes) || deadlinePassed(budget.deadline)) {
      budgetHit = true;
      return;
    }
    auto point = solveLCPWithFixings(lcp, fix);
    if (!point) return;
    long j = branchingIndex(*point, fix);
    if (j < 0) {
      if (auto sol = polish(lcp, *point)) {
        frontier.push_back({std::move(fix), std::move(sol)});
        return;
      }
      j = firstFree(fix);
      if (j < 0) return;
    }
    std::vector<Fixing> second = fix;
    second[static_cast<std::size_t>(j)] = Fixing::WZero;
    fix[static_cast<std::size_t>(j)] = Fixing::ZVarZero;
    expand(std::move(fix), depth + 1);
    expand(std::move(second), depth + 1);
  };
  expand(std::vector<Fixing>(lcp.size(), Fixing::Free), 0);

  // Stop expanding once an earlier-solved entry makes the rest irrelevant.
  std::size_t firstSolved = frontier.size();
  for (std::size_t i = 0; i < frontier.size(); ++i)
    if (frontier[i].solution) {
      firstSolved = i;
      break;
    }

  const std::size_t count = std::min(firstSolved, frontier.size());
  std::atomic<std::size_t> best{firstSolved};
  std::vector<SearchResult> results(count);
  const long total = static_cast<long>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (long i = 0; i < total; ++i) {
    const std::size_t idx = static_cast<std::size_t>(i);
    if (idx > best.load()) {
      results[idx].end = SearchEnd::Cancelled;
      continue;
    }
    results[idx] = depthFirst(lcp, frontier[idx].fixings, budget, nodes,
                              [&best, idx] { return best.load() < idx; });
    if (results[idx].end == SearchEnd::Found) {
      std::size_t cur = best.load();
      while (idx < cur && !best.compare_exchange_weak(cur, idx)) {
      }
    }
  }

  LCPOutcome out;
  out.nodes = nodes.load();
  const std::size_t winner = best.load();
  // Any budget stop before the winner means an earlier solution may have been
  // missed, so the answer would not match the serial search.
  for (std::size_t i = 0; i < std::min(winner, count); ++i)
    if (results[i].end == SearchEnd::Budget) budgetHit = true;
  if (budgetHit) {
    out.status = LCPStatus::BudgetExhausted;
    return out;
  }
  if (winner < frontier.size()) {
    out.status = LCPStatus::Solved;
    out.solution = winner < count ? results[winner].solution : frontier[winner].solution;
    return out;
  }
  out.status = LCPStatus::NoSolution;
  return out;
}

LCPOutcome solveLCPLemke(const LCP& lcp, const LCPBudget& budget) {
  lcp.validate();
  const std::size_t n = lcp.size();
  if (nonnegative(lcp.q)) {
    LCPOutcome out = trivialOutcome(lcp);
    out.solution->method = LCPMethod::Lemke;
    return out;
  }
  // Columns: w_0..w_{n-1}, z_0..z_{n-1}, z0 (artificial). Tableau rows hold
  // B^-1 [I, -M, -e] and the rhs B^-1 q.
  const std::size_t cols = 2 * n + 1;
  const std::size_t artificial = 2 * n;
  DenseMatrix tab(n, cols);
  Vector rhs = lcp.q;
  std::vector<std::size_t> basis(n);
  for (std::size_t i = 0; i < n; ++i) {
    tab(i, i) = 1.0;
    for (std::size_t k = 0; k < n; ++k) tab(i, n + k) = -lcp.M(i, k);
    tab(i, artificial) = -1.0;
    basis[i] = i;
  }
  auto pivot = [&](std::size_t row, std::size_t col) {
    const double p = tab(row, col);
    for (std::size_t j = 0; j < cols; ++j) tab(row, j) /= p;
    rhs[row] /= p;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == row) continue;
      const double f = tab(i, col);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < cols; ++j) tab(i, j) -= f * tab(row, j);
      rhs[i] -= f * rhs[row];
    }
    basis[row] = col;
  };

  LCPOutcome out;
  const std::size_t maxPivots = budget.maxPivots ? budget.maxPivots : 50 * n + 100;
  std::size_t row = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (rhs[i] < rhs[row]) row = i;
  std::size_t leaving = basis[row];
  pivot(row, artificial);
  ++out.pivots;

  while (true) {
    if (leaving == artificial) break;
    if (out.pivots >= maxPivots || deadlinePassed(budget.deadline)) {
      out.status = out.pivots >= maxPivots ? LCPStatus::Inconclusive : LCPStatus::BudgetExhausted;
      return out;
    }
    const std::size_t entering = leaving < n ? leaving + n : leaving - n;
    long best = -1;
    double bestRatio = kInf;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = tab(i, entering);
      if (a <= 1e-12) continue;
      const double ratio = rhs[i] / a;
      const bool tie =
          best >= 0 && std::abs(ratio - bestRatio) <= 1e-12 * (1.0 + std::abs(bestRatio));
      if (ratio < bestRatio && !tie) {
        bestRatio = ratio;
        best = static_cast<long>(i);
      } else if (tie && basis[i] == artificial) {
        best = static_cast<long>(i);  // let z0 leave on ties
      }
    }
    if (best < 0) {
      out.status = LCPStatus::Inconclusive;  // secondary ray
      return out;
    }
    leaving = basis[static_cast<std::size_t>(best)];
    pivot(static_cast<std::size_t>(best), entering);
    ++out.pivots;
  }

  LCPSolution sol;
  sol.method = LCPMethod::Lemke;
  sol.z.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (basis[i] >= n && basis[i] < 2 * n) sol.z[basis[i] - n] = std::max(0.0, rhs[i]);
  sol.w = lcp.residual(sol.z);
  out.status = LCPStatus::Solved;
  out.solution = std::move(sol);
  return out;
}

LCPOutcome solveLCP(const LCP& lcp, LCPMethod method, const LCPBudget& budget) {
  if (method == LCPMethod::Lemke) return solveLCPLemke(lcp, budget);
  if (budget.workers > 1) return solveLCPBranchingParallel(lcp, budget);
  return solveLCPBranchingSerial(lcp, budget);
}

}  // namespace rbg::mathopt
