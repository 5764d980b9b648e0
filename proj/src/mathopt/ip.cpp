#include "rbg/mathopt/ip.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "rbg/error.hpp"

namespace rbg::mathopt {

namespace {

constexpr double kIntegralityTol = 1e-6;

struct Node {
  double bound;
  std::size_t id;
  Vector lower;
  Vector upper;
  Vector x;
};

struct WorseBound {
  bool operator()(const Node& a, const Node& b) const {
    return a.bound != b.bound ? a.bound > b.bound : a.id > b.id;
  }
};

long mostFractional(std::span<const double> x, std::span<const std::size_t> integers) {
  long best = -1;
  double bestScore = kIntegralityTol;
  for (std::size_t j : integers) {
    const double frac = x[j] - std::floor(x[j]);
    const double score = std::min(frac, 1.0 - frac);
    if (score > bestScore) {
      bestScore = score;
      best = static_cast<long>(j);
    }
  }
  return best;
}

bool budgetSpent(const IPBudget& budget, std::size_t nodes) {
  if (budget.maxNodes != 0 && nodes >= budget.maxNodes) return true;
  return budget.deadline && std::chrono::steady_clock::now() >= *budget.deadline;
}

}  // namespace

IPResult solveMIP(const LinearProgram& lp, std::span<const std::size_t> integers,
                  const IPBudget& budget) {
  lp.validate();
  for (std::size_t j : integers) {
    if (j >= lp.numVariables()) throw UsageError("solveMIP: integer index out of range");
    if (!std::isfinite(lp.lower[j]) || !std::isfinite(lp.upper[j]))
      throw UsageError("solveMIP: integer variable " + std::to_string(j) +
                       " needs finite bounds");
  }

  IPResult result;
  LinearProgram work = lp;
  for (std::size_t j : integers) {
    work.lower[j] = std::ceil(work.lower[j] - kIntegralityTol);
    work.upper[j] = std::floor(work.upper[j] + kIntegralityTol);
    if (work.lower[j] > work.upper[j]) return result;
  }

  std::size_t nextId = 0;
  double incumbent = kInf;
  std::priority_queue<Node, std::vector<Node>, WorseBound> open;

  // Solves a node relaxation; returns true if it is unbounded.
  auto evaluate = [&](Vector lower, Vector upper) {
    work.lower = std::move(lower);
    work.upper = std::move(upper);
    ++result.nodes;
    LPResult relaxed = solveLP(work);
    if (relaxed.status == LPStatus::Unbounded) return true;
    if (relaxed.status != LPStatus::Optimal) return false;
    if (relaxed.objective >= incumbent - 1e-9 * (1.0 + std::abs(incumbent))) return false;
    const long branch = mostFractional(relaxed.x, integers);
    if (branch < 0) {
      Vector x = relaxed.x;
      for (std::size_t j : integers) x[j] = std::round(x[j]);
      const double value = dot(lp.objective, x);
      if (value < incumbent) {
        incumbent = value;
        result.x = std::move(x);
        result.objective = value;
        result.hasIncumbent = true;
      }
      return false;
    }
    open.push(Node{relaxed.objective, nextId++, work.lower, work.upper, relaxed.x});
    return false;
  };

  if (evaluate(work.lower, work.upper)) {
    result.status = IPStatus::Unbounded;
    return result;
  }

  while (!open.empty()) {
    if (budgetSpent(budget, result.nodes)) {
      result.status = IPStatus::BudgetExhausted;
      return result;
    }
    Node node = open.top();
    open.pop();
    if (node.bound >= incumbent - 1e-9 * (1.0 + std::abs(incumbent))) continue;
    const std::size_t j = static_cast<std::size_t>(mostFractional(node.x, integers));
    const double value = node.x[j];

    Vector downUpper = node.upper;
    downUpper[j] = std::floor(value);
    if (downUpper[j] >= node.lower[j]) evaluate(node.lower, std::move(downUpper));

    Vector upLower = node.lower;
    upLower[j] = std::ceil(value);
    if (upLower[j] <= node.upper[j]) evaluate(std::move(upLower), node.upper);
  }
  result.status = result.hasIncumbent ? IPStatus::Optimal : IPStatus::Infeasible;
  return result;
}

// ------------------------------------------------------------- PlayerProgram

PlayerProgram::PlayerProgram(Vector cost, SparseMatrix cross, SparseMatrix constraints,
                             Vector rhs, std::vector<std::size_t> integers,
                             std::vector<Bounds> bounds)
    : cost_(std::move(cost)),
      cross_(std::move(cross)),
      constraints_(std::move(constraints)),
      rhs_(std::move(rhs)),
      integers_(std::move(integers)),
      bounds_(std::move(bounds)) {
  const std::size_t m = cost_.size();
  requireFinite(cost_, "PlayerProgram cost");
  requireFinite(rhs_, "PlayerProgram rhs");
  if (cross_.cols() != m)
    throw UsageError("PlayerProgram: C must have one column per own variable");
  if (constraints_.cols() != m && constraints_.rows() != 0)
    throw UsageError("PlayerProgram: A must have one column per own variable");
  if (constraints_.cols() != m) constraints_ = SparseMatrix(constraints_.rows(), m);
  if (constraints_.rows() != rhs_.size())
    throw UsageError("PlayerProgram: b must have one entry per row of A");
  if (bounds_.size() != m) throw UsageError("PlayerProgram: one bound pair per variable required");
  for (std::size_t j = 0; j < m; ++j) {
    const Bounds& b = bounds_[j];
    if (std::isnan(b.lower) || std::isnan(b.upper) || b.lower == kInf || b.upper == -kInf)
      throw UsageError("PlayerProgram: invalid bounds on variable " + std::to_string(j));
    if (b.lower > b.upper)
      throw UsageError("PlayerProgram: lower > upper on variable " + std::to_string(j));
  }
  integerMask_.assign(m, false);
  for (std::size_t j : integers_) {
    if (j >= m) throw UsageError("PlayerProgram: integer index " + std::to_string(j) + " out of range");
    if (integerMask_[j]) throw UsageError("PlayerProgram: duplicate integer index " + std::to_string(j));
    if (!std::isfinite(bounds_[j].lower) || !std::isfinite(bounds_[j].upper))
      throw UsageError("PlayerProgram: integer variable " + std::to_string(j) +
                       " requires finite bounds");
    integerMask_[j] = true;
  }
  std::sort(integers_.begin(), integers_.end());
}

Vector PlayerProgram::lowerBounds() const {
  Vector l(bounds_.size());
  for (std::size_t j = 0; j < l.size(); ++j) l[j] = bounds_[j].lower;
  return l;
}

Vector PlayerProgram::upperBounds() const {
  Vector u(bounds_.size());
  for (std::size_t j = 0; j < u.size(); ++j) u[j] = bounds_[j].upper;
  return u;
}

LinearProgram PlayerProgram::relaxation() const { return relaxation(cost_); }

LinearProgram PlayerProgram::relaxation(Vector objective) const {
  if (objective.size() != numVariables())
    throw UsageError("PlayerProgram::relaxation: objective length mismatch");
  LinearProgram lp;
  lp.objective = std::move(objective);
  lp.constraints = constraints_.toDense();
  lp.rhs = rhs_;
  lp.lower = lowerBounds();
  lp.upper = upperBounds();
  return lp;
}

bool PlayerProgram::isFeasible(std::span<const double> x, double eps) const {
  if (x.size() != numVariables()) throw UsageError("PlayerProgram::isFeasible: dimension mismatch");
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] < bounds_[j].lower - eps || x[j] > bounds_[j].upper + eps) return false;
    if (integerMask_[j] && std::abs(x[j] - std::round(x[j])) > eps) return false;
  }
  const Vector ax = constraints_.multiply(x);
  for (std::size_t r = 0; r < ax.size(); ++r)
    if (ax[r] > rhs_[r] + eps) return false;
  return true;
}

Vector parametrizedObjective(const PlayerProgram& p, std::span<const double> opponents) {
  if (opponents.size() != p.numOpponentVariables())
    throw UsageError("parametrizedObjective: expected " +
                     std::to_string(p.numOpponentVariables()) + " opponent values, got " +
                     std::to_string(opponents.size()));
  return add(p.cost(), p.cross().multiplyTransposed(opponents));
}

double payoff(const PlayerProgram& p, std::span<const double> own,
              std::span<const double> opponents) {
  if (own.size() != p.numVariables()) throw UsageError("payoff: own dimension mismatch");
  return dot(parametrizedObjective(p, opponents), own);
}

IPResult solveIP(const PlayerProgram& p, std::span<const double> opponents,
                 const IPBudget& budget) {
  return solveMIP(p.relaxation(parametrizedObjective(p, opponents)), p.integers(), budget);
}

}  // namespace rbg::mathopt
