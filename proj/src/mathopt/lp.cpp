#include "rbg/mathopt/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rbg/error.hpp"

namespace rbg::mathopt {

LinearProgram LinearProgram::withBounds(Vector lower, Vector upper) {
  LinearProgram lp;
  lp.objective.assign(lower.size(), 0.0);
  lp.constraints = DenseMatrix(0, lower.size());
  lp.lower = std::move(lower);
  lp.upper = std::move(upper);
  return lp;
}

void LinearProgram::addRow(std::span<const double> coefficients, double bound, RowSense s) {
  if (coefficients.size() != numVariables())
    throw UsageError("LinearProgram::addRow: row length differs from variable count");
  if (constraints.cols() != numVariables()) constraints = DenseMatrix(0, numVariables());
  senses.resize(numRows(), RowSense::LessEqual);
  constraints.appendRow(coefficients);
  rhs.push_back(bound);
  senses.push_back(s);
}

void LinearProgram::validate() const {
  const std::size_t n = numVariables();
  if (constraints.cols() != n && !(constraints.rows() == 0))
    throw UsageError("LinearProgram: constraint columns differ from objective length");
  if (constraints.rows() != rhs.size())
    throw UsageError("LinearProgram: rhs length differs from row count");
  if (lower.size() != n || upper.size() != n)
    throw UsageError("LinearProgram: bounds length differs from variable count");
  if (!senses.empty() && senses.size() != rhs.size())
    throw UsageError("LinearProgram: senses length differs from row count");
  requireFinite(objective, "LinearProgram objective");
  requireFinite(rhs, "LinearProgram rhs");
  for (std::size_t r = 0; r < constraints.rows(); ++r)
    requireFinite(constraints.row(r), "LinearProgram constraints");
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] == kInf || upper[j] == -kInf)
      throw UsageError("LinearProgram: invalid bound on variable " + std::to_string(j));
    if (lower[j] > upper[j])
      throw UsageError("LinearProgram: lower > upper on variable " + std::to_string(j));
  }
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kOptimalityTol = 1e-9;
constexpr std::size_t kRefreshEvery = 64;

enum class Outcome { Optimal, Unbounded };

class BoundedSimplex {
 public:
  BoundedSimplex(const LinearProgram& lp, const SimplexOptions& options)
      : lp_(lp), m_(lp.numRows()), n_(lp.numVariables()) {
    const std::size_t base = n_ + m_;
    Vector xN(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      if (std::isfinite(lp.lower[j]))
        xN[j] = lp.lower[j];
      else if (std::isfinite(lp.upper[j]))
        xN[j] = lp.upper[j];
      else
        xN[j] = 0.0;
    }
    Vector residual(m_);
    std::vector<double> artSign(m_, 0.0);
    std::size_t numArt = 0;
    for (std::size_t r = 0; r < m_; ++r) {
      double s = lp.rhs[r];
      for (std::size_t j = 0; j < n_; ++j) s -= lp.constraints(r, j) * xN[j];
      residual[r] = s;
      if (lp.sense(r) == RowSense::Equal || s < 0.0) {
        artSign[r] = s >= 0.0 ? 1.0 : -1.0;
        ++numArt;
      }
    }
    cols_ = base + numArt;
    tab_ = DenseMatrix(m_, cols_);
    lo_.assign(cols_, 0.0);
    up_.assign(cols_, kInf);
    val_.assign(cols_, 0.0);
    basic_.assign(cols_, -1);
    basis_.assign(m_, -1);
    beta_.assign(m_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      lo_[j] = lp.lower[j];
      up_[j] = lp.upper[j];
      val_[j] = xN[j];
    }
    for (std::size_t r = 0; r < m_; ++r)
      if (lp.sense(r) == RowSense::Equal) up_[n_ + r] = 0.0;

    std::size_t art = base;
    for (std::size_t r = 0; r < m_; ++r) {
      auto row = tab_.row(r);
      for (std::size_t j = 0; j < n_; ++j) row[j] = lp.constraints(r, j);
      row[n_ + r] = 1.0;
      if (artSign[r] != 0.0) {
        row[art] = artSign[r];
        const double sign = artSign[r];
        for (double& v : row) v /= sign;
        setBasic(r, art);
        beta_[r] = std::abs(residual[r]);
        artificials_.push_back(art);
        ++art;
      } else {
        setBasic(r, n_ + r);
        beta_[r] = residual[r];
      }
    }
    const std::size_t size = m_ + cols_;
    blandAfter_ = options.blandAfter ? options.blandAfter : 20 * size;
    maxPivots_ = options.maxPivots ? options.maxPivots : 200 * size + 1000;
  }

  LPResult run(OptimalTableau* tableauOut) {
    LPResult result;
    if (!artificials_.empty()) {
      Vector phase1(cols_, 0.0);
      for (std::size_t a : artificials_) phase1[a] = 1.0;
      iterate(phase1, /*phaseOne=*/true);
      refreshBasicValues();
      double infeasibility = 0.0;
      for (std::size_t r = 0; r < m_; ++r)
        if (isArtificial(basis_[r])) infeasibility += std::max(0.0, beta_[r]);
      const double scaleB = 1.0 + normInf(lp_.rhs);
      if (infeasibility > 1e-7 * scaleB) {
        result.status = LPStatus::Infeasible;
        result.pivots = pivots_;
        return result;
      }
      for (std::size_t a : artificials_) {
        up_[a] = 0.0;
        if (basic_[a] < 0) val_[a] = 0.0;
      }
      driveOutArtificials();
      refreshBasicValues();
    }
    Vector phase2(cols_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) phase2[j] = lp_.objective[j];
    if (iterate(phase2, /*phaseOne=*/false) == Outcome::Unbounded) {
      result.status = LPStatus::Unbounded;
      result.pivots = pivots_;
      return result;
    }
    refreshBasicValues();

    Vector all = columnValues();
    Vector d = reducedCosts(phase2);
    result.status = LPStatus::Optimal;
    result.x.assign(all.begin(), all.begin() + static_cast<long>(n_));
    for (std::size_t j = 0; j < n_; ++j) {
      // Snap onto bounds that the basic solution reaches up to rounding.
      if (std::isfinite(lo_[j]) && std::abs(result.x[j] - lo_[j]) < 1e-12) result.x[j] = lo_[j];
      if (std::isfinite(up_[j]) && std::abs(result.x[j] - up_[j]) < 1e-12) result.x[j] = up_[j];
    }
    result.objective = dot(lp_.objective, result.x);
    result.reducedCosts.assign(d.begin(), d.begin() + static_cast<long>(n_));
    result.rowDuals.assign(d.begin() + static_cast<long>(n_),
                           d.begin() + static_cast<long>(n_ + m_));
    result.pivots = pivots_;

    if (tableauOut != nullptr) {
      OptimalTableau& t = *tableauOut;
      t.numStructural = n_;
      t.numRows = m_;
      t.rows = DenseMatrix(m_, n_ + m_);
      t.basis.assign(m_, -1);
      for (std::size_t r = 0; r < m_; ++r) {
        for (std::size_t j = 0; j < n_ + m_; ++j) t.rows(r, j) = tab_(r, j);
        if (!isArtificial(basis_[r])) t.basis[r] = basis_[r];
      }
      t.values.assign(all.begin(), all.begin() + static_cast<long>(n_ + m_));
      t.lower.assign(lo_.begin(), lo_.begin() + static_cast<long>(n_ + m_));
      t.upper.assign(up_.begin(), up_.begin() + static_cast<long>(n_ + m_));
    }
    return result;
  }

 private:
  bool isArtificial(long col) const { return col >= static_cast<long>(n_ + m_); }

  void setBasic(std::size_t row, std::size_t col) {
    if (basis_[row] >= 0) basic_[static_cast<std::size_t>(basis_[row])] = -1;
    basis_[row] = static_cast<long>(col);
    basic_[col] = static_cast<long>(row);
  }

  Vector columnValues() const {
    Vector v = val_;
    for (std::size_t r = 0; r < m_; ++r)
      if (basis_[r] >= 0) v[static_cast<std::size_t>(basis_[r])] = beta_[r];
    return v;
  }

  Vector reducedCosts(const Vector& cost) const {
    Vector d = cost;
    for (std::size_t r = 0; r < m_; ++r) {
      const double cb = cost[static_cast<std::size_t>(basis_[r])];
      if (cb == 0.0) continue;
      auto row = tab_.row(r);
      for (std::size_t j = 0; j < cols_; ++j) d[j] -= cb * row[j];
    }
    for (std::size_t r = 0; r < m_; ++r) d[static_cast<std::size_t>(basis_[r])] = 0.0;
    return d;
  }

  // beta = B^-1 b - sum_{nonbasic j} T_j x_j; the slack block of T is B^-1.
  void refreshBasicValues() {
    for (std::size_t r = 0; r < m_; ++r) {
      auto row = tab_.row(r);
      double v = 0.0;
      for (std::size_t k = 0; k < m_; ++k) v += row[n_ + k] * lp_.rhs[k];
      for (std::size_t j = 0; j < cols_; ++j)
        if (basic_[j] < 0 && val_[j] != 0.0) v -= row[j] * val_[j];
      beta_[r] = v;
    }
  }

  void pivot(std::size_t row, std::size_t col) {
    auto prow = tab_.row(row);
    const double p = prow[col];
    for (double& v : prow) v /= p;
    prow[col] = 1.0;
    for (std::size_t r = 0; r < m_; ++r) {
      if (r == row) continue;
      auto other = tab_.row(r);
      const double f = other[col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < cols_; ++j) other[j] -= f * prow[j];
      other[col] = 0.0;
    }
    setBasic(row, col);
  }

  void driveOutArtificials() {
    for (std::size_t r = 0; r < m_; ++r) {
      if (!isArtificial(basis_[r])) continue;
      auto row = tab_.row(r);
      long best = -1;
      double bestAbs = 1e-7;
      for (std::size_t j = 0; j < n_ + m_; ++j) {
        if (basic_[j] >= 0) continue;
        if (std::abs(row[j]) > bestAbs) {
          bestAbs = std::abs(row[j]);
          best = static_cast<long>(j);
        }
      }
      if (best < 0) continue;  // redundant row; the artificial stays basic at zero
      const std::size_t leaving = static_cast<std::size_t>(basis_[r]);
      pivot(r, static_cast<std::size_t>(best));
      val_[leaving] = 0.0;
      ++pivots_;
    }
  }

  Outcome iterate(const Vector& cost, bool phaseOne) {
    std::size_t sinceRefresh = 0;
    while (true) {
      if (pivots_ >= maxPivots_)
        throw NumericalFailure("solveLP: pivot budget exhausted (" + std::to_string(maxPivots_) +
                               " pivots)");
      const bool bland = pivots_ >= blandAfter_;
      Vector d = reducedCosts(cost);

      long entering = -1;
      double enterDir = 0.0;
      double bestScore = 0.0;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (basic_[j] >= 0 || lo_[j] == up_[j]) continue;
        double dir = 0.0;
        const bool atLower = std::isfinite(lo_[j]) && val_[j] <= lo_[j];
        const bool atUpper = std::isfinite(up_[j]) && val_[j] >= up_[j];
        if (!atUpper && d[j] < -kOptimalityTol)
          dir = 1.0;
        else if (!atLower && d[j] > kOptimalityTol)
          dir = -1.0;
        if (dir == 0.0) continue;
        if (bland) {
          entering = static_cast<long>(j);
          enterDir = dir;
          break;
        }
        if (std::abs(d[j]) > bestScore) {
          bestScore = std::abs(d[j]);
          entering = static_cast<long>(j);
          enterDir = dir;
        }
      }
      if (entering < 0) return Outcome::Optimal;
      const std::size_t j = static_cast<std::size_t>(entering);

      // Ratio test.
      double step = kInf;
      long leaveRow = -1;
      double leaveValue = 0.0;
      double leavePivot = 0.0;
      if (std::isfinite(lo_[j]) && std::isfinite(up_[j])) step = up_[j] - lo_[j];
      for (std::size_t r = 0; r < m_; ++r) {
        const double alpha = tab_(r, j);
        if (std::abs(alpha) <= kPivotTol) continue;
        const double rate = -alpha * enterDir;
        const std::size_t b = static_cast<std::size_t>(basis_[r]);
        double limit;
        double bound;
        if (rate < 0.0) {
          if (!std::isfinite(lo_[b])) continue;
          bound = lo_[b];
          limit = std::max(0.0, (beta_[r] - bound) / -rate);
        } else {
          if (!std::isfinite(up_[b])) continue;
          bound = up_[b];
          limit = std::max(0.0, (bound - beta_[r]) / rate);
        }
        bool take = false;
        if (limit < step - 1e-12) {
          take = true;
        } else if (limit <= step + 1e-12 && leaveRow >= 0) {
          if (bland)
            take = basis_[r] < basis_[static_cast<std::size_t>(leaveRow)];
          else
            take = std::abs(alpha) > leavePivot;
        }
        if (take) {
          step = std::min(step, limit);
          leaveRow = static_cast<long>(r);
          leaveValue = bound;
          leavePivot = std::abs(alpha);
        }
      }
      if (!std::isfinite(step)) {
        if (phaseOne) throw NumericalFailure("solveLP: unbounded phase-one problem");
        return Outcome::Unbounded;
      }

      const double delta = enterDir * step;
      if (delta != 0.0)
        for (std::size_t r = 0; r < m_; ++r) beta_[r] -= tab_(r, j) * delta;
      const double enteringValue = val_[j] + delta;
      ++pivots_;
      if (leaveRow < 0) {
        // Bound flip.
        val_[j] = enterDir > 0 ? up_[j] : lo_[j];
        continue;
      }
      const std::size_t r = static_cast<std::size_t>(leaveRow);
      const std::size_t leaving = static_cast<std::size_t>(basis_[r]);
      pivot(r, j);
      val_[leaving] = leaveValue;
      beta_[r] = enteringValue;
      if (++sinceRefresh >= kRefreshEvery) {
        refreshBasicValues();
        sinceRefresh = 0;
      }
    }
  }

  const LinearProgram& lp_;
  std::size_t m_;
  std::size_t n_;
  std::size_t cols_ = 0;
  DenseMatrix tab_;
  Vector lo_, up_, val_, beta_;
  std::vector<long> basic_;  // column -> row, -1 when nonbasic
  std::vector<long> basis_;  // row -> column
  std::vector<std::size_t> artificials_;
  std::size_t pivots_ = 0;
  std::size_t blandAfter_ = 0;
  std::size_t maxPivots_ = 0;
};

}  // namespace

LPResult solveLP(const LinearProgram& lp, const SimplexOptions& options,
                 OptimalTableau* tableau) {
  lp.validate();
  BoundedSimplex simplex(lp, options);
  return simplex.run(tableau);
}

}  // namespace rbg::mathopt
