#pragma once

#include <Eigen/Dense>
#include <functional>

#include "rbg/mathopt/lp.hpp"
#include "rbg/mathopt/poly.hpp"

namespace oracles {

using namespace rbg;
using namespace rbg::mathopt;

// Vertices of a bounded polyhedron by brute force over tight constraint sets.
inline std::vector<Vector> vertices(const Polyhedron& p) {
  const std::size_t n = p.dimension();
  std::vector<Vector> rows;
  Vector rhs;
  for (std::size_t r = 0; r < p.numRows(); ++r) {
    rows.emplace_back(p.A.row(r).begin(), p.A.row(r).end());
    rhs.push_back(p.b[r]);
  }
  for (std::size_t j = 0; j < n; ++j) {
    Vector e(n, 0.0);
    e[j] = 1.0;
    rows.push_back(e);
    rhs.push_back(p.upper[j]);
    e[j] = -1.0;
    rows.push_back(e);
    rhs.push_back(-p.lower[j]);
  }
  std::vector<Vector> out;
  std::vector<std::size_t> pick(n);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t depth) {
    if (depth == n) {
      Eigen::MatrixXd A(n, n);
      Eigen::VectorXd b(n);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) A(i, j) = rows[pick[i]][j];
        b(i) = rhs[pick[i]];
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
      if (lu.rank() < static_cast<long>(n)) return;
      Eigen::VectorXd x = lu.solve(b);
      Vector v(x.data(), x.data() + n);
      if (contains(p, v, 1e-9)) out.push_back(v);
      return;
    }
    for (std::size_t i = start; i < rows.size(); ++i) {
      pick[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  return out;
}

// Independent membership oracle: x is a convex combination of piece vertices.
inline bool vertexCombinationContains(const std::vector<Polyhedron>& pieces, const Vector& x) {
  std::vector<Vector> all;
  for (const Polyhedron& p : pieces)
    for (Vector& v : vertices(p)) all.push_back(std::move(v));
  if (all.empty()) return false;
  const std::size_t n = x.size();
  LinearProgram lp = LinearProgram::withBounds(Vector(all.size(), 0.0), Vector(all.size(), kInf));
  for (std::size_t j = 0; j < n; ++j) {
    Vector row(all.size());
    for (std::size_t k = 0; k < all.size(); ++k) row[k] = all[k][j];
    lp.addRow(row, x[j], RowSense::Equal);
  }
  lp.addRow(Vector(all.size(), 1.0), 1.0, RowSense::Equal);
  return solveLP(lp).status == LPStatus::Optimal;
}

}  // namespace oracles
