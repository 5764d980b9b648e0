#include "rbg/algorithms/separation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rbg/error.hpp"

namespace rbg::algorithms {

using mathopt::ExtendedHull;
using mathopt::LinearProgram;
using mathopt::LPResult;
using mathopt::LPStatus;
using mathopt::OptimalTableau;

namespace {

constexpr double kIntegralityTol = 1e-6;
constexpr double kMembershipTol = 1e-6;
constexpr double kMinViolation = 1e-6;

double fractionality(double v) { return std::abs(v - std::round(v)); }

bool integralOn(const PlayerProgram& p, std::span<const double> x) {
  for (std::size_t j : p.integers())
    if (fractionality(x[j]) > kIntegralityTol) return false;
  return true;
}

Vector roundIntegers(const PlayerProgram& p, std::span<const double> x) {
  Vector out(x.begin(), x.end());
  for (std::size_t j : p.integers()) out[j] = std::round(out[j]);
  return out;
}

// Sums the weights of coinciding points, keeping first-seen order.
std::vector<WeightedPoint> merge(std::vector<WeightedPoint> points) {
  std::vector<WeightedPoint> out;
  for (WeightedPoint& wp : points) {
    auto same = std::find_if(out.begin(), out.end(), [&](const WeightedPoint& o) {
      return normInf(subtract(o.point, wp.point)) <= 1e-9;
    });
    if (same != out.end())
      same->weight += wp.weight;
    else
      out.push_back(std::move(wp));
  }
  return out;
}

// Row r of the sparse constraint matrix as (column, value) pairs.
std::vector<std::pair<std::size_t, double>> sparseRow(const PlayerProgram& p, std::size_t r) {
  std::vector<std::pair<std::size_t, double>> out;
  for (const Triplet& t : p.constraints().entries())
    if (t.row == r) out.emplace_back(t.col, t.value);
  return out;
}

Polyhedron withCut(Polyhedron piece, const Cut& cut) {
  piece.addRow(cut.coefficients, cut.rhs);
  return piece;
}

}  // namespace

PlayerRegion PlayerRegion::initial(const PlayerProgram& p) {
  Polyhedron relax(p.constraints().toDense(), p.rhs(), p.lowerBounds(), p.upperBounds());
  if (!relax.isBounded())
    throw UsageError("cutAndPlay: every variable needs finite bounds");
  PlayerRegion r;
  r.pieces.push_back(std::move(relax));
  return r;
}

ExtendedHull PlayerRegion::hull() const { return ExtendedHull(pieces, pieces.front().dimension()); }

std::optional<Cut> knapsackCover(const PlayerProgram& p, std::size_t row,
                                 std::span<const double> sigma, double minViolation) {
  const auto entries = sparseRow(p, row);
  if (entries.empty()) return std::nullopt;
  double capacity = p.rhs()[row];
  struct Item {
    std::size_t var;
    double weight;
    bool complemented;
    double value;  // sigma in the complemented space
  };
  std::vector<Item> items;
  for (auto [j, a] : entries) {
    const auto& b = p.bounds()[j];
    if (!p.isInteger(j) || b.lower != 0.0 || b.upper != 1.0) return std::nullopt;
    if (a < 0.0) {
      capacity -= a;
      items.push_back({j, -a, true, 1.0 - sigma[j]});
    } else {
      items.push_back({j, a, false, sigma[j]});
    }
  }
  double total = 0.0;
  for (const Item& it : items) total += it.weight;
  if (total <= capacity + 1e-9) return std::nullopt;

  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return (1.0 - items[a].value) / items[a].weight < (1.0 - items[b].value) / items[b].weight;
  });
  std::vector<std::size_t> cover;
  double load = 0.0;
  for (std::size_t k : order) {
    cover.push_back(k);
    load += items[k].weight;
    if (load > capacity + 1e-9) break;
  }
  // Drop items while the set stays a cover, lowest sigma first.
  std::stable_sort(cover.begin(), cover.end(),
                   [&](std::size_t a, std::size_t b) { return items[a].value < items[b].value; });
  std::vector<std::size_t> minimal;
  for (std::size_t idx = 0; idx < cover.size(); ++idx) {
    const std::size_t k = cover[idx];
    if (load - items[k].weight > capacity + 1e-9)
      load -= items[k].weight;
    else
      minimal.push_back(k);
  }

  Cut cut{Vector(p.numVariables(), 0.0), static_cast<double>(minimal.size()) - 1.0};
  for (std::size_t k : minimal) {
    if (items[k].complemented) {
      cut.coefficients[items[k].var] = -1.0;
      cut.rhs -= 1.0;
    } else {
      cut.coefficients[items[k].var] = 1.0;
    }
  }
  if (cut.violation(sigma) < minViolation) return std::nullopt;
  return cut;
}

std::vector<Cut> gomoryCuts(const PlayerProgram& p, const Polyhedron& piece,
                            std::span<const double> sigma, double minViolation) {
  const std::size_t n = piece.dimension();
  // An objective whose optimal face is the minimal face containing sigma.
  Vector objective(n, 0.0);
  const Vector as = piece.A.multiply(sigma);
  for (std::size_t r = 0; r < piece.numRows(); ++r)
    if (as[r] >= piece.b[r] - 1e-7)
      for (std::size_t j = 0; j < n; ++j) objective[j] -= piece.A(r, j);
  for (std::size_t j = 0; j < n; ++j) {
    if (sigma[j] >= piece.upper[j] - 1e-7) objective[j] -= 1.0;
    if (sigma[j] <= piece.lower[j] + 1e-7) objective[j] += 1.0;
  }
  OptimalTableau tab;
  const LPResult lp = mathopt::solveLP(piece.asProgram(objective), {}, &tab);
  if (lp.status != LPStatus::Optimal || normInf(subtract(lp.x, Vector(sigma.begin(), sigma.end()))) > 1e-7)
    return {};

  const std::size_t m = tab.numRows;
  std::vector<bool> basic(n + m, false);
  for (long b : tab.basis)
    if (b >= 0) basic[static_cast<std::size_t>(b)] = true;

  std::vector<Cut> cuts;
  for (std::size_t r = 0; r < m; ++r) {
    if (tab.basis[r] < 0) continue;
    const std::size_t jb = static_cast<std::size_t>(tab.basis[r]);
    if (jb >= n || !p.isInteger(jb)) continue;
    const double f0 = tab.values[jb] - std::floor(tab.values[jb]);
    if (f0 < 1e-3 || f0 > 1.0 - 1e-3) continue;

    // Sum pi_k t_k >= 1 in the nonbasic distances t_k >= 0, expanded into
    // alpha . x >= beta.
    Vector alpha(n, 0.0);
    double beta = 1.0;
    bool usable = true;
    for (std::size_t k = 0; k < n + m && usable; ++k) {
      if (basic[k] || tab.lower[k] == tab.upper[k]) continue;
      const double abar = tab.rows(r, k);
      if (std::abs(abar) < 1e-12) continue;
      bool atLower;
      if (std::abs(tab.values[k] - tab.lower[k]) <= 1e-9)
        atLower = true;
      else if (std::abs(tab.values[k] - tab.upper[k]) <= 1e-9)
        atLower = false;
      else {
        usable = false;
        break;
      }
      const double a = atLower ? abar : -abar;
      const double bound = atLower ? tab.lower[k] : tab.upper[k];
      double pi;
      if (k < n && p.isInteger(k) && fractionality(bound) == 0.0) {
        const double fk = a - std::floor(a);
        pi = fk <= f0 ? fk / f0 : (1.0 - fk) / (1.0 - f0);
      } else {
        pi = a >= 0.0 ? a / f0 : -a / (1.0 - f0);
      }
      if (pi == 0.0) continue;
      // t_k = x_k - l_k | u_k - x_k for structurals, b_r - A_r x for slacks.
      if (k < n) {
        alpha[k] += atLower ? pi : -pi;
        beta += atLower ? pi * bound : -pi * bound;
      } else {
        const std::size_t row = k - n;
        for (std::size_t j = 0; j < n; ++j) alpha[j] -= pi * piece.A(row, j);
        beta -= pi * piece.b[row];
      }
    }
    if (!usable) continue;

    double biggest = normInf(alpha);
    if (biggest < 1e-9) continue;
    // Remove negligible coefficients, weakening the cut by their largest
    // possible contribution.
    double smallest = kInf;
    for (std::size_t j = 0; j < n; ++j) {
      if (alpha[j] == 0.0) continue;
      if (std::abs(alpha[j]) < 1e-9 * biggest) {
        beta -= std::abs(alpha[j]) * std::max(std::abs(piece.lower[j]), std::abs(piece.upper[j]));
        alpha[j] = 0.0;
      } else {
        smallest = std::min(smallest, std::abs(alpha[j]));
      }
    }
    if (biggest / smallest > 1e6) continue;
    Cut cut{scale(alpha, -1.0 / biggest), -beta / biggest};
    cut.rhs += 1e-9 * (1.0 + std::abs(cut.rhs));
    if (cut.violation(sigma) >= minViolation) cuts.push_back(std::move(cut));
  }
  return cuts;
}

SeparationResult separationOracle(const PlayerProgram& p, std::span<const double> sigma,
                                  const PlayerRegion& region) {
  SeparationResult out;
  if (integralOn(p, sigma)) {
    Vector x = roundIntegers(p, sigma);
    if (p.isFeasible(x, kMembershipTol)) {
      out.support.push_back({1.0, std::move(x)});
      return out;
    }
  }

  const ExtendedHull hull = region.hull();
  std::vector<WeightedPoint> parts;
  try {
    parts = mathopt::decompose(hull, sigma, kMembershipTol);
  } catch (const UsageError&) {
    throw NumericalFailure("separationOracle: sigma is not in the current region");
  }

  bool allIntegral = true;
  for (const WeightedPoint& wp : parts)
    if (!integralOn(p, wp.point) || !p.isFeasible(roundIntegers(p, wp.point), kMembershipTol))
      allIntegral = false;
  if (allIntegral) {
    for (WeightedPoint& wp : parts) wp.point = roundIntegers(p, wp.point);
    out.support = merge(std::move(parts));
    return out;
  }

  for (std::size_t r = 0; r < p.rhs().size(); ++r)
    if (auto cut = knapsackCover(p, r, sigma, kMinViolation)) out.cuts.push_back(std::move(*cut));
  if (out.cuts.empty() && region.branches == 0 && region.pieces.size() == 1)
    out.cuts = gomoryCuts(p, region.pieces.front(), sigma, kMinViolation);
  if (!out.cuts.empty()) {
    out.kind = SeparationKind::Cuts;
    return out;
  }

  // Branch on the heaviest fractional point of the decomposition.
  const WeightedPoint* target = nullptr;
  for (const WeightedPoint& wp : parts)
    if (!integralOn(p, wp.point) && (target == nullptr || wp.weight > target->weight))
      target = &wp;
  if (target == nullptr) {
    // Integral but infeasible points: the pieces are not tight enough to
    // split on a fractional value, which a bounded region cannot produce.
    throw NumericalFailure("separationOracle: integral decomposition point outside the feasible set");
  }
  double worst = -1.0;
  for (std::size_t j : p.integers()) {
    const double f = fractionality(target->point[j]);
    if (f > kIntegralityTol && f > worst + 1e-12) {
      worst = f;
      out.variable = j;
    }
  }
  out.value = target->point[out.variable];
  out.piece = region.pieces.size();
  for (std::size_t k = 0; k < region.pieces.size(); ++k) {
    const Polyhedron& piece = region.pieces[k];
    if (piece.lower[out.variable] < out.value && out.value < piece.upper[out.variable] &&
        mathopt::contains(piece, target->point, kMembershipTol)) {
      out.piece = k;
      break;
    }
  }
  if (out.piece == region.pieces.size())
    throw NumericalFailure("separationOracle: fractional point matches no piece");
  out.kind = SeparationKind::Branch;
  return out;
}

bool refineRegion(PlayerRegion& region, const SeparationResult& action) {
  switch (action.kind) {
    case SeparationKind::Member:
      return true;
    case SeparationKind::Infeasible:
      region.pieces.clear();
      return false;
    case SeparationKind::Cuts: {
      std::vector<Polyhedron> kept;
      for (Polyhedron& piece : region.pieces) {
        for (const Cut& c : action.cuts) piece = withCut(std::move(piece), c);
        if (!mathopt::isEmpty(piece)) kept.push_back(std::move(piece));
      }
      region.cuts.insert(region.cuts.end(), action.cuts.begin(), action.cuts.end());
      region.pieces = std::move(kept);
      return !region.pieces.empty();
    }
    case SeparationKind::Branch: {
      if (action.piece >= region.pieces.size())
        throw UsageError("refineRegion: branching piece out of range");
      const Polyhedron parent = region.pieces[action.piece];
      Polyhedron down = parent, up = parent;
      down.upper[action.variable] = std::floor(action.value);
      up.lower[action.variable] = std::ceil(action.value);
      std::vector<Polyhedron> children;
      for (Polyhedron* child : {&down, &up})
        if (!mathopt::isEmpty(*child)) children.push_back(std::move(*child));
      region.pieces.erase(region.pieces.begin() + static_cast<long>(action.piece));
      region.pieces.insert(region.pieces.begin() + static_cast<long>(action.piece),
                           children.begin(), children.end());
      ++region.branches;
      return !region.pieces.empty();
    }
  }
  return true;
}

}  // namespace rbg::algorithms
