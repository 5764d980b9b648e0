#include "rbg/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rbg/error.hpp"

namespace rbg {

void Tolerances::validate() const {
  if (!(feasibility_eps > 0) || !(complementarity_eps > 0) || !(deviation_eps > 0) ||
      !(zero_eps > 0))
    throw UsageError("Tolerances: all tolerances must be strictly positive");
}

bool approxEq(double a, double b, double eps) { return std::abs(a - b) <= eps; }

void requireFinite(std::span<const double> values, const char* what) {
  for (double v : values)
    if (!std::isfinite(v)) throw UsageError(std::string(what) + ": non-finite entry");
}

namespace {
void requireSameSize(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw UsageError(std::string(what) + ": dimension mismatch");
}
}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  requireSameSize(a.size(), b.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double normInf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

Vector add(std::span<const double> a, std::span<const double> b) {
  requireSameSize(a.size(), b.size(), "add");
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vector subtract(std::span<const double> a, std::span<const double> b) {
  requireSameSize(a.size(), b.size(), "subtract");
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vector scale(std::span<const double> a, double factor) {
  Vector r(a.begin(), a.end());
  for (double& v : r) v *= factor;
  return r;
}

// ---------------------------------------------------------------- DenseMatrix

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

void DenseMatrix::appendRow(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  requireSameSize(values.size(), cols_, "DenseMatrix::appendRow");
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

Vector DenseMatrix::multiply(std::span<const double> x) const {
  requireSameSize(x.size(), cols_, "DenseMatrix::multiply");
  Vector y(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    const double* a = data_.data() + r * cols_;
    double s = 0.0;
    for (std::size_t c = 0; c < cols_; ++c) s += a[c] * x[c];
    y[r] = s;
  }
  return y;
}

Vector DenseMatrix::multiplyTransposed(std::span<const double> y) const {
  requireSameSize(y.size(), rows_, "DenseMatrix::multiplyTransposed");
  Vector x(cols_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    if (y[r] == 0.0) continue;
    const double* a = data_.data() + r * cols_;
    for (std::size_t c = 0; c < cols_; ++c) x[c] += a[c] * y[r];
  }
  return x;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

// --------------------------------------------------------------- SparseMatrix

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<Triplet> entries)
    : rows_(rows), cols_(cols) {
  for (const Triplet& t : entries) {
    if (t.row >= rows || t.col >= cols)
      throw UsageError("SparseMatrix: entry (" + std::to_string(t.row) + "," +
                       std::to_string(t.col) + ") out of bounds");
    if (!std::isfinite(t.value)) throw UsageError("SparseMatrix: non-finite entry");
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  for (std::size_t i = 1; i < entries.size(); ++i)
    if (entries[i].row == entries[i - 1].row && entries[i].col == entries[i - 1].col)
      throw UsageError("SparseMatrix: duplicate entry (" + std::to_string(entries[i].row) + "," +
                       std::to_string(entries[i].col) + ")");
  std::erase_if(entries, [](const Triplet& t) { return t.value == 0.0; });
  entries_ = std::move(entries);
}

SparseMatrix SparseMatrix::fromDense(const DenseMatrix& dense) {
  std::vector<Triplet> entries;
  for (std::size_t r = 0; r < dense.rows(); ++r)
    for (std::size_t c = 0; c < dense.cols(); ++c)
      if (dense(r, c) != 0.0) entries.push_back({r, c, dense(r, c)});
  return SparseMatrix(dense.rows(), dense.cols(), std::move(entries));
}

void SparseMatrix::set(std::size_t r, std::size_t c, double value) {
  if (r >= rows_ || c >= cols_) throw UsageError("SparseMatrix::set: index out of bounds");
  if (!std::isfinite(value)) throw UsageError("SparseMatrix::set: non-finite value");
  auto it = std::lower_bound(entries_.begin(), entries_.end(), Triplet{r, c, 0.0},
                             [](const Triplet& a, const Triplet& b) {
                               return a.row != b.row ? a.row < b.row : a.col < b.col;
                             });
  const bool present = it != entries_.end() && it->row == r && it->col == c;
  if (value == 0.0) {
    if (present) entries_.erase(it);
  } else if (present) {
    it->value = value;
  } else {
    entries_.insert(it, Triplet{r, c, value});
  }
}

double SparseMatrix::get(std::size_t r, std::size_t c) const {
  for (const Triplet& t : entries_)
    if (t.row == r && t.col == c) return t.value;
  return 0.0;
}

DenseMatrix SparseMatrix::toDense() const {
  DenseMatrix d(rows_, cols_);
  for (const Triplet& t : entries_) d(t.row, t.col) = t.value;
  return d;
}

Vector SparseMatrix::multiply(std::span<const double> x) const {
  requireSameSize(x.size(), cols_, "spmv");
  Vector y(rows_, 0.0);
  for (const Triplet& t : entries_) y[t.row] += t.value * x[t.col];
  return y;
}

Vector SparseMatrix::multiplyTransposed(std::span<const double> y) const {
  requireSameSize(y.size(), rows_, "SparseMatrix::multiplyTransposed");
  Vector x(cols_, 0.0);
  for (const Triplet& t : entries_) x[t.col] += t.value * y[t.row];
  return x;
}

Vector spmv(const SparseMatrix& m, std::span<const double> x) { return m.multiply(x); }

// ------------------------------------------------------------------ SeededRng

std::uint64_t SeededRng::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::int64_t SeededRng::uniformInt(std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw UsageError("SeededRng::uniformInt: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(next());  // full 64-bit range
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t draw;
  do {
    draw = next();
  } while (draw >= limit);
  return lo + static_cast<std::int64_t>(draw % span);
}

double SeededRng::uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

SeededRng seededRng(std::uint64_t seed) { return SeededRng(seed); }

}  // namespace rbg
