#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace rbg {

using Vector = std::vector<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Numerical tolerances shared by every solver. All must be strictly positive.
struct Tolerances {
  double feasibility_eps = 1e-7;
  double complementarity_eps = 1e-7;
  double deviation_eps = 3e-4;
  double zero_eps = 1e-9;

  void validate() const;
};

bool approxEq(double a, double b, double eps);

/// Throws UsageError if any entry is NaN or infinite.
void requireFinite(std::span<const double> values, const char* what);

double dot(std::span<const double> a, std::span<const double> b);
double normInf(std::span<const double> a);
Vector add(std::span<const double> a, std::span<const double> b);
Vector subtract(std::span<const double> a, std::span<const double> b);
Vector scale(std::span<const double> a, double factor);

/// Row-major dense matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  /// Appends a row; the matrix adopts the row length if it has no columns yet.
  void appendRow(std::span<const double> values);

  Vector multiply(std::span<const double> x) const;
  Vector multiplyTransposed(std::span<const double> y) const;
  DenseMatrix transposed() const;

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;

  bool operator==(const Triplet&) const = default;
};

/// Sparse matrix kept as row-major sorted triplets with no duplicates and no
/// explicit zeros.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols);
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<Triplet> entries);

  static SparseMatrix fromDense(const DenseMatrix& dense);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::vector<Triplet>& entries() const { return entries_; }

  /// Sets entry (r, c); a zero value removes it.
  void set(std::size_t r, std::size_t c, double value);
  double get(std::size_t r, std::size_t c) const;

  DenseMatrix toDense() const;
  Vector multiply(std::span<const double> x) const;
  Vector multiplyTransposed(std::span<const double> y) const;

  bool operator==(const SparseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Triplet> entries_;
};

/// Sparse matrix-vector product M x.
Vector spmv(const SparseMatrix& m, std::span<const double> x);

/// SplitMix64 generator. The recurrence is fixed (increment 0x9e3779b97f4a7c15,
/// multipliers 0xbf58476d1ce4e5b9 and 0x94d049bb133111eb) so streams are
/// identical on every platform and standard library.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  /// Uniform integer in [lo, hi] by rejection sampling.
  std::int64_t uniformInt(std::int64_t lo, std::int64_t hi);
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();

 private:
  std::uint64_t state_;
};

SeededRng seededRng(std::uint64_t seed);

}  // namespace rbg
