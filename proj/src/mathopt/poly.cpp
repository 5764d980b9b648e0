#include "rbg/mathopt/poly.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rbg/error.hpp"

namespace rbg::mathopt {

Polyhedron::Polyhedron(DenseMatrix a, Vector rhs, Vector lo, Vector hi)
    : A(std::move(a)), b(std::move(rhs)), lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size()) throw UsageError("Polyhedron: bounds length mismatch");
  if (A.rows() == 0 && A.cols() != lower.size()) A = DenseMatrix(0, lower.size());
  if (A.cols() != lower.size()) throw UsageError("Polyhedron: A columns differ from dimension");
  if (A.rows() != b.size()) throw UsageError("Polyhedron: b length differs from rows of A");
}

bool Polyhedron::isBounded() const {
  return std::all_of(lower.begin(), lower.end(), [](double v) { return std::isfinite(v); }) &&
         std::all_of(upper.begin(), upper.end(), [](double v) { return std::isfinite(v); });
}

void Polyhedron::addRow(std::span<const double> coefficients, double bound) {
  if (coefficients.size() != dimension()) throw UsageError("Polyhedron::addRow: length mismatch");
  A.appendRow(coefficients);
  b.push_back(bound);
}

LinearProgram Polyhedron::asProgram(Vector objective) const {
  LinearProgram lp;
  lp.objective = std::move(objective);
  lp.constraints = A;
  lp.rhs = b;
  lp.lower = lower;
  lp.upper = upper;
  return lp;
}

bool contains(const Polyhedron& p, std::span<const double> x, double eps) {
  if (x.size() != p.dimension()) throw UsageError("contains: dimension mismatch");
  for (std::size_t j = 0; j < x.size(); ++j)
    if (x[j] < p.lower[j] - eps || x[j] > p.upper[j] + eps) return false;
  const Vector ax = p.A.multiply(x);
  for (std::size_t r = 0; r < ax.size(); ++r)
    if (ax[r] > p.b[r] + eps) return false;
  return true;
}

bool isEmpty(const Polyhedron& p) {
  for (std::size_t j = 0; j < p.dimension(); ++j)
    if (p.lower[j] > p.upper[j]) return true;
  return solveLP(p.asProgram(Vector(p.dimension(), 0.0))).status == LPStatus::Infeasible;
}

// -------------------------------------------------------------- ExtendedHull

ExtendedHull::ExtendedHull(std::vector<Polyhedron> pieces, std::size_t projectedDim)
    : pieces_(std::move(pieces)), projectedDim_(projectedDim) {
  if (pieces_.empty()) throw EmptyUnion("convexHull: no nonempty piece");
  const std::size_t d = pieces_.front().dimension();
  if (projectedDim_ > d) throw UsageError("convexHull: projected dimension exceeds piece dimension");
  for (const Polyhedron& p : pieces_) {
    if (p.dimension() != d) throw UsageError("convexHull: pieces differ in dimension");
    if (!p.isBounded()) throw UsageError("convexHull: every piece needs finite variable bounds");
  }
}

namespace {

// Column layout of the lifted program: copies y^k first, then lambda_k.
struct LiftedLayout {
  std::size_t dim;
  std::size_t pieces;
  std::size_t y(std::size_t k, std::size_t j) const { return k * dim + j; }
  std::size_t lambda(std::size_t k) const { return pieces * dim + k; }
  std::size_t size() const { return pieces * (dim + 1); }
};

// Appends the per-piece rows of the Balas formulation to `lp`, whose columns
// start at `offset`.
void appendPieceRows(const std::vector<Polyhedron>& pieces, const LiftedLayout& layout,
                     std::size_t offset, std::size_t width, DenseMatrix& A, Vector& b) {
  Vector row(width);
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const Polyhedron& piece = pieces[k];
    for (std::size_t r = 0; r < piece.numRows(); ++r) {
      std::fill(row.begin(), row.end(), 0.0);
      for (std::size_t j = 0; j < layout.dim; ++j) row[offset + layout.y(k, j)] = piece.A(r, j);
      row[offset + layout.lambda(k)] = -piece.b[r];
      A.appendRow(row);
      b.push_back(0.0);
    }
    for (std::size_t j = 0; j < layout.dim; ++j) {
      std::fill(row.begin(), row.end(), 0.0);
      row[offset + layout.y(k, j)] = 1.0;
      row[offset + layout.lambda(k)] = -piece.upper[j];
      A.appendRow(row);
      b.push_back(0.0);
      std::fill(row.begin(), row.end(), 0.0);
      row[offset + layout.y(k, j)] = -1.0;
      row[offset + layout.lambda(k)] = piece.lower[j];
      A.appendRow(row);
      b.push_back(0.0);
    }
  }
}

std::pair<double, double> copyBounds(const std::vector<Polyhedron>& pieces, std::size_t k,
                                     std::size_t j) {
  return {std::min(0.0, pieces[k].lower[j]), std::max(0.0, pieces[k].upper[j])};
}

}  // namespace

Polyhedron ExtendedHull::liftedPolyhedron() const {
  const LiftedLayout layout{pieceDimension(), pieces_.size()};
  const std::size_t p = projectedDim_;
  const std::size_t width = p + layout.size();
  Polyhedron lifted(DenseMatrix(0, width), {}, Vector(width), Vector(width));
  for (std::size_t j = 0; j < p; ++j) {
    double lo = kInf, hi = -kInf;
    for (const Polyhedron& piece : pieces_) {
      lo = std::min(lo, piece.lower[j]);
      hi = std::max(hi, piece.upper[j]);
    }
    lifted.lower[j] = lo;
    lifted.upper[j] = hi;
  }
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    for (std::size_t j = 0; j < layout.dim; ++j) {
      auto [lo, hi] = copyBounds(pieces_, k, j);
      lifted.lower[p + layout.y(k, j)] = lo;
      lifted.upper[p + layout.y(k, j)] = hi;
    }
    lifted.lower[p + layout.lambda(k)] = 0.0;
    lifted.upper[p + layout.lambda(k)] = 1.0;
  }
  appendPieceRows(pieces_, layout, p, width, lifted.A, lifted.b);
  Vector row(width);
  for (std::size_t j = 0; j < p; ++j) {
    std::fill(row.begin(), row.end(), 0.0);
    row[j] = 1.0;
    for (std::size_t k = 0; k < pieces_.size(); ++k) row[p + layout.y(k, j)] = -1.0;
    lifted.addRow(row, 0.0);
    lifted.addRow(scale(row, -1.0), 0.0);
  }
  std::fill(row.begin(), row.end(), 0.0);
  for (std::size_t k = 0; k < pieces_.size(); ++k) row[p + layout.lambda(k)] = 1.0;
  lifted.addRow(row, 1.0);
  lifted.addRow(scale(row, -1.0), -1.0);
  return lifted;
}

ExtendedHull::Projection ExtendedHull::project(std::span<const double> x) const {
  if (x.size() != projectedDim_) throw UsageError("ExtendedHull: dimension mismatch");
  const LiftedLayout layout{pieceDimension(), pieces_.size()};
  const std::size_t p = projectedDim_;
  const std::size_t base = layout.size();
  const std::size_t width = base + 2 * p;  // then t+ and t-

  LinearProgram lp;
  lp.objective.assign(width, 0.0);
  lp.lower.assign(width, 0.0);
  lp.upper.assign(width, kInf);
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    for (std::size_t j = 0; j < layout.dim; ++j) {
      auto [lo, hi] = copyBounds(pieces_, k, j);
      lp.lower[layout.y(k, j)] = lo;
      lp.upper[layout.y(k, j)] = hi;
    }
    lp.upper[layout.lambda(k)] = 1.0;
  }
  for (std::size_t j = base; j < width; ++j) lp.objective[j] = 1.0;
  lp.constraints = DenseMatrix(0, width);
  appendPieceRows(pieces_, layout, 0, width, lp.constraints, lp.rhs);

  Vector row(width, 0.0);
  for (std::size_t k = 0; k < pieces_.size(); ++k) row[layout.lambda(k)] = 1.0;
  lp.addRow(row, 1.0, RowSense::Equal);
  for (std::size_t j = 0; j < p; ++j) {
    std::fill(row.begin(), row.end(), 0.0);
    for (std::size_t k = 0; k < pieces_.size(); ++k) row[layout.y(k, j)] = 1.0;
    row[base + j] = 1.0;
    row[base + p + j] = -1.0;
    lp.addRow(row, x[j], RowSense::Equal);
  }

  const LPResult res = solveLP(lp);
  if (res.status != LPStatus::Optimal)
    throw NumericalFailure("ExtendedHull::project: distance LP not solved to optimality");
  Projection out;
  out.distance = res.objective;
  out.lambda.resize(pieces_.size());
  out.copies.resize(pieces_.size());
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    out.lambda[k] = res.x[layout.lambda(k)];
    out.copies[k].assign(res.x.begin() + static_cast<long>(layout.y(k, 0)),
                         res.x.begin() + static_cast<long>(layout.y(k, 0) + layout.dim));
  }
  return out;
}

ExtendedHull convexHullOfProjections(std::vector<Polyhedron> pieces, std::size_t projectedDim) {
  if (pieces.empty()) throw EmptyUnion("convexHull: no pieces given");
  const std::size_t d = pieces.front().dimension();
  for (const Polyhedron& p : pieces) {
    if (p.dimension() != d) throw UsageError("convexHull: pieces differ in dimension");
    if (!p.isBounded()) throw UsageError("convexHull: every piece needs finite variable bounds");
  }
  std::erase_if(pieces, [](const Polyhedron& p) { return isEmpty(p); });
  if (pieces.empty()) throw EmptyUnion("convexHull: every piece is empty");
  return ExtendedHull(std::move(pieces), projectedDim);
}

ExtendedHull convexHull(std::vector<Polyhedron> pieces) {
  const std::size_t d = pieces.empty() ? 0 : pieces.front().dimension();
  return convexHullOfProjections(std::move(pieces), d);
}

bool hullContains(const ExtendedHull& h, std::span<const double> x, double eps) {
  return h.project(x).distance <= eps;
}

std::vector<WeightedPoint> decompose(const ExtendedHull& h, std::span<const double> x,
                                     double eps, double zeroEps) {
  ExtendedHull::Projection proj = h.project(x);
  if (proj.distance > eps) throw UsageError("decompose: point is not a hull member");
  std::vector<WeightedPoint> out;
  double total = 0.0;
  for (std::size_t k = 0; k < proj.lambda.size(); ++k) {
    const double lambda = proj.lambda[k];
    if (lambda <= zeroEps) continue;
    Vector point = scale(proj.copies[k], 1.0 / lambda);
    point.resize(h.dimension());
    out.push_back({lambda, std::move(point)});
    total += lambda;
  }
  for (WeightedPoint& wp : out) wp.weight /= total;
  return out;
}

}  // namespace rbg::mathopt
