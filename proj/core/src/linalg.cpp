#include "ddiv/linalg.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <regex>
#include <string>
#include <utility>

#include "ddiv/error.hpp"

namespace ddiv {

Vector solve_dense(const DenseMatrix& a, const Vector& b, double rel_tol) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || b.size() != n) {
    throw ParameterError("solve_dense: dimension mismatch");
  }
  DenseMatrix lu = a;
  Vector x = b;
  const double scale = n > 0 ? a.cwiseAbs().maxCoeff() : 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index p = k;
    double best = std::abs(lu(k, k));
    for (Eigen::Index i = k + 1; i < n; ++i) {
      if (std::abs(lu(i, k)) > best) {
        best = std::abs(lu(i, k));
        p = i;
      }
    }
    if (!(best > rel_tol * scale)) {
      throw SingularMatrixError("solve_dense: singular to working precision at column " +
                                    std::to_string(k) + " (pivot " + std::to_string(best) + ")",
                                static_cast<long>(k), best);
    }
    if (p != k) {
      lu.row(k).swap(lu.row(p));
      std::swap(x(k), x(p));
    }
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const double f = lu(i, k) / lu(k, k);
      if (f == 0.0) continue;
      lu.row(i).tail(n - k - 1) -= f * lu.row(k).tail(n - k - 1);
      x(i) -= f * x(k);
    }
  }
  for (Eigen::Index k = n - 1; k >= 0; --k) {
    double s = x(k);
    for (Eigen::Index j = k + 1; j < n; ++j) s -= lu(k, j) * x(j);
    x(k) = s / lu(k, k);
  }
  return x;
}

void SparseSystemCore::add_symmetric(int i, int j, double v) {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) {
    throw ParameterError("SparseSystemCore: index out of range");
  }
  triplets_.emplace_back(i, j, v);
  if (i != j) triplets_.emplace_back(j, i, v);
}

SparseMatrix SparseSystemCore::matrix() const {
  SparseMatrix m(n_, n_);
  m.setFromTriplets(triplets_.begin(), triplets_.end());
  return m;
}

SparseMatrix SparseSystemCore::upper() const {
  SparseMatrix full = matrix();
  return SparseMatrix(full.triangularView<Eigen::Upper>());
}

SparseSystemCore SparseSystemCore::from_upper(const SparseMatrix& upper) {
  SparseSystemCore s(static_cast<int>(upper.rows()));
  for (int k = 0; k < upper.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(upper, k); it; ++it)
      if (it.row() <= it.col()) s.add_symmetric(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  return s;
}

double relative_residual(const SparseMatrix& a, const Vector& x, const Vector& b) {
  const Vector r = a * x - b;
  const double nb = b.norm();
  return nb > 0.0 ? r.norm() / nb : r.norm();
}

double max_asymmetry(const SparseMatrix& a) {
  const SparseMatrix d = a - SparseMatrix(a.transpose());
  double m = 0.0;
  for (int k = 0; k < d.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(d, k); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

namespace {

Vector solve_sparse(const SparseMatrix& s, const Vector& rhs, const SolveOptions& opts,
                    SolveInfo& info) {
  SparseMatrix a = s;
  a.makeCompressed();
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success) {
    // Eigen reports the failing column of the permuted matrix; map it back.
    const std::string msg = lu.lastErrorMessage();
    long index = -1;
    std::smatch m;
    if (std::regex_search(msg, m, std::regex("([0-9]+)\\s*$"))) {
      const long permuted = std::stol(m[1].str());
      const auto& perm = lu.colsPermutation().indices();
      index = permuted;
      for (Eigen::Index k = 0; k < perm.size(); ++k)
        if (perm(k) == permuted) index = static_cast<long>(k);
    }
    throw SingularMatrixError("solve_saddle: sparse LU breakdown at unknown " +
                                  std::to_string(index) + ": " + msg,
                              index, 0.0);
  }
  Vector x = lu.solve(rhs);
  info.relative_residual = relative_residual(a, x, rhs);
  // One or two steps of iterative refinement keep the residual at rounding level.
  for (int step = 0; step < 2 && info.relative_residual > 1e-14; ++step) {
    const Vector r = rhs - a * x;
    x += lu.solve(r);
    info.refinement_steps = step + 1;
    info.relative_residual = relative_residual(a, x, rhs);
  }
  // Tiny nonzero pivots do not fail the factorization; they surface here.
  if (!std::isfinite(info.relative_residual) || info.relative_residual > opts.residual_tolerance) {
    const Vector r = rhs - a * x;
    Eigen::Index worst = 0;
    r.cwiseAbs().maxCoeff(&worst);
    throw SingularMatrixError("solve_saddle: breakdown, relative residual " +
                                  std::to_string(info.relative_residual) + " worst at unknown " +
                                  std::to_string(worst),
                              static_cast<long>(worst), 0.0);
  }
  return x;
}

}  // namespace

Vector solve_saddle(const SparseMatrix& s, const Vector& rhs, const SolveOptions& opts,
                    SolveInfo* info_out) {
  if (s.rows() != s.cols() || s.rows() != rhs.size()) {
    throw ParameterError("solve_saddle: dimension mismatch");
  }
  SolveInfo info;
  SolverStrategy strategy = opts.strategy;
  if (strategy == SolverStrategy::Auto) {
    strategy = s.rows() < opts.dense_threshold ? SolverStrategy::Dense : SolverStrategy::Sparse;
  }
  info.used = strategy;
  Vector x;
  if (strategy == SolverStrategy::Dense) {
    const DenseMatrix d(s);
    x = solve_dense(d, rhs, opts.pivot_tolerance);
    info.relative_residual = relative_residual(s, x, rhs);
  } else {
    x = solve_sparse(s, rhs, opts, info);
  }
  if (info_out) *info_out = info;
  return x;
}

}  // namespace ddiv
