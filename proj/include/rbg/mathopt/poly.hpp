#pragma once

#include <cstddef>
#include <vector>

#include "rbg/mathopt/lp.hpp"
#include "rbg/numerics.hpp"

namespace rbg::mathopt {

/// {x : A x <= b, lower <= x <= upper}. An empty row set is allowed.
struct Polyhedron {
  DenseMatrix A;
  Vector b;
  Vector lower;
  Vector upper;

  Polyhedron() = default;
  Polyhedron(DenseMatrix a, Vector rhs, Vector lo, Vector hi);

  std::size_t dimension() const { return lower.size(); }
  std::size_t numRows() const { return b.size(); }
  bool isBounded() const;

  void addRow(std::span<const double> coefficients, double bound);
  LinearProgram asProgram(Vector objective) const;
};

bool contains(const Polyhedron& p, std::span<const double> x, double eps);

/// True iff the polyhedron has no point, decided by an LP.
bool isEmpty(const Polyhedron& p);

struct WeightedPoint {
  double weight;
  Vector point;
};

/// Convex hull of a union of bounded polyhedra in lifted (Balas) form:
///
///   x = P(sum_k y^k),   A_k y^k <= b_k lambda_k,
///   lower_k lambda_k <= y^k <= upper_k lambda_k,   sum_k lambda_k = 1,  lambda >= 0
///
/// where P projects onto the first `dimension()` coordinates. Pieces usually
/// live in the same space as x; a larger piece space expresses the hull of
/// projections (used when a lifted hull is itself fed back as a piece).
class ExtendedHull {
 public:
  ExtendedHull(std::vector<Polyhedron> pieces, std::size_t projectedDim);

  std::size_t dimension() const { return projectedDim_; }
  std::size_t pieceDimension() const { return pieces_.front().dimension(); }
  const std::vector<Polyhedron>& pieces() const { return pieces_; }

  /// The lifted polyhedron over (x, y^1..y^K, lambda_1..lambda_K); its
  /// projection onto the first dimension() coordinates is the hull.
  Polyhedron liftedPolyhedron() const;

  /// Minimal L1 distance from x to the hull together with the lifted solution.
  struct Projection {
    double distance;
    std::vector<double> lambda;
    std::vector<Vector> copies;
  };
  Projection project(std::span<const double> x) const;

 private:
  std::vector<Polyhedron> pieces_;
  std::size_t projectedDim_;
};

/// Hull of the union of `pieces`. Empty pieces are dropped; throws EmptyUnion
/// if all are empty and UsageError on mismatched dimensions or an unbounded
/// piece (every variable needs finite bounds).
ExtendedHull convexHull(std::vector<Polyhedron> pieces);

/// Hull of the projections of `pieces` onto their first `projectedDim`
/// coordinates.
ExtendedHull convexHullOfProjections(std::vector<Polyhedron> pieces, std::size_t projectedDim);

bool hullContains(const ExtendedHull& h, std::span<const double> x, double eps = 1e-7);

/// Writes x as a convex combination of points of the pieces. Multipliers below
/// zeroEps are dropped and the remaining weights renormalized. Throws
/// UsageError if x is not a member.
std::vector<WeightedPoint> decompose(const ExtendedHull& h, std::span<const double> x,
                                     double eps = 1e-7, double zeroEps = 1e-9);

}  // namespace rbg::mathopt
