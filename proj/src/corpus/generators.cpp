#include "rbg/corpus/generators.hpp"

#include <cmath>

#include "rbg/error.hpp"

namespace rbg::corpus {

using mathopt::Bounds;
using mathopt::PlayerProgram;

namespace {

PlayerProgram knapsackPlayer(Vector c, SparseMatrix C, std::vector<Vector> rows, Vector b) {
  const std::size_t m = c.size();
  SparseMatrix A(rows.size(), m);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t j = 0; j < m; ++j) A.set(r, j, rows[r][j]);
  std::vector<std::size_t> integers(m);
  for (std::size_t j = 0; j < m; ++j) integers[j] = j;
  return PlayerProgram(std::move(c), std::move(C), std::move(A), std::move(b), std::move(integers),
                       std::vector<Bounds>(m, Bounds{0.0, 1.0}));
}

SparseMatrix diagonal(double a, double b) { return SparseMatrix(2, 2, {{0, 0, a}, {1, 1, b}}); }

PlayerProgram blue(std::size_t opponents) {
  return knapsackPlayer({-1, -2}, opponents ? diagonal(2, 3) : SparseMatrix(0, 2), {{3, 4}}, {5});
}

PlayerProgram red() { return knapsackPlayer({-3, -5}, diagonal(5, 4), {{2, 5}}, {5}); }

}  // namespace

void GeneratorSpec::validate() const {
  if (players == 0) throw UsageError("GeneratorSpec: at least one player");
  if (items == 0) throw UsageError("GeneratorSpec: at least one item per player");
  if (range < 1) throw UsageError("GeneratorSpec: range must be at least 1");
  if (!(capacityFraction >= 0.0 && capacityFraction <= 1.0))
    throw UsageError("GeneratorSpec: capacity fraction must lie in [0, 1]");
}

models::Instance canonicalKnapsackGame() {
  models::Instance g("knapsack_game");
  g.addPlayer(blue(2), "blue");
  g.addPlayer(red(), "red");
  return g;
}

models::Instance randomKnapsackGame(const GeneratorSpec& spec) {
  spec.validate();
  SeededRng rng(spec.seed);
  const std::size_t opp = (spec.players - 1) * spec.items;
  models::Instance g("knapsack_" + std::to_string(spec.players) + "x" + std::to_string(spec.items) +
                     "_seed" + std::to_string(spec.seed));
  for (std::size_t i = 0; i < spec.players; ++i) {
    Vector c(spec.items), a(spec.items);
    for (double& v : c) v = static_cast<double>(rng.uniformInt(-spec.range, -1));
    SparseMatrix C(opp, spec.items);
    for (std::size_t r = 0; r < opp; ++r)
      for (std::size_t j = 0; j < spec.items; ++j)
        C.set(r, j, static_cast<double>(rng.uniformInt(-spec.range, spec.range)));
    double total = 0.0;
    for (double& v : a) total += (v = static_cast<double>(rng.uniformInt(1, spec.range)));
    const double b = std::ceil(spec.capacityFraction * total);
    g.addPlayer(knapsackPlayer(std::move(c), std::move(C), {a}, {b}), "player" + std::to_string(i));
  }
  return g;
}

models::Instance singlePlayerKnapsack() {
  models::Instance g("single_knapsack");
  g.addPlayer(blue(0), "blue");
  return g;
}

models::Instance emptyFeasibleSetGame() {
  models::Instance g("empty_feasible_set");
  g.addPlayer(blue(2), "blue");
  g.addPlayer(knapsackPlayer({-3, -5}, diagonal(5, 4), {{2, 5}, {-1, -1}}, {5, -2}), "red");
  return g;
}

}  // namespace rbg::corpus
