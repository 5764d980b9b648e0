#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "rbg/games/game.hpp"

namespace fixtures {

using rbg::SeededRng;
using rbg::SparseMatrix;
using rbg::Vector;
using rbg::games::GameModel;
using rbg::mathopt::Bounds;
using rbg::mathopt::PlayerProgram;

inline PlayerProgram binaryPlayer(Vector c, SparseMatrix cross, std::vector<Vector> rows, Vector b) {
  const std::size_t m = c.size();
  SparseMatrix A(rows.size(), m);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t j = 0; j < m; ++j) A.set(r, j, rows[r][j]);
  std::vector<std::size_t> ints(m);
  for (std::size_t j = 0; j < m; ++j) ints[j] = j;
  return PlayerProgram(std::move(c), std::move(cross), std::move(A), std::move(b), ints,
                       std::vector<Bounds>(m, Bounds{0, 1}));
}

inline SparseMatrix diag2(double a, double b) {
  return SparseMatrix(2, 2, {{0, 0, a}, {1, 1, b}});
}

inline PlayerProgram blue() { return binaryPlayer({-1, -2}, diag2(2, 3), {{3, 4}}, {5}); }
inline PlayerProgram red() { return binaryPlayer({-3, -5}, diag2(5, 4), {{2, 5}}, {5}); }
inline GameModel knapsackGame() { return GameModel({blue(), red()}); }

inline std::vector<Vector> binaryPoints(const PlayerProgram& p) {
  std::vector<Vector> out;
  const std::size_t m = p.numVariables();
  for (std::uint64_t mask = 0; mask < (1ULL << m); ++mask) {
    Vector x(m);
    for (std::size_t j = 0; j < m; ++j) x[j] = (mask >> j) & 1ULL ? 1.0 : 0.0;
    if (p.isFeasible(x, 0.0)) out.push_back(x);
  }
  return out;
}

/// Two binary knapsack players with m_i in [1, 3], data in [-5, 5] and
/// capacity ceil(sum a / 2).
inline GameModel randomBinaryGame(SeededRng& rng) {
  std::vector<PlayerProgram> players;
  const std::size_t ms[2] = {static_cast<std::size_t>(rng.uniformInt(1, 3)),
                             static_cast<std::size_t>(rng.uniformInt(1, 3))};
  for (std::size_t i = 0; i < 2; ++i) {
    const std::size_t m = ms[i], mo = ms[1 - i];
    Vector c(m);
    for (double& v : c) v = static_cast<double>(rng.uniformInt(-5, 5));
    SparseMatrix C(mo, m);
    for (std::size_t r = 0; r < mo; ++r)
      for (std::size_t j = 0; j < m; ++j) C.set(r, j, static_cast<double>(rng.uniformInt(-5, 5)));
    Vector a(m);
    double total = 0.0;
    for (double& v : a) total += (v = static_cast<double>(rng.uniformInt(1, 5)));
    players.push_back(binaryPlayer(c, C, {a}, {std::ceil(total / 2)}));
  }
  return GameModel(std::move(players));
}

}  // namespace fixtures
