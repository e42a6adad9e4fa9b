#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <string>
#include <vector>

namespace ddiv {

using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Gaussian elimination with partial pivoting.  Throws SingularMatrixError
/// (carrying the pivot index and magnitude) when a pivot falls below
/// rel_tol * max|A_ij|.
Vector solve_dense(const DenseMatrix& a, const Vector& b, double rel_tol = 1e-14);

/// Square sparse system assembled from symmetric contributions.  Both
/// triangles are stored so the matrix can be handed to unsymmetric-pivoting
/// direct solvers unchanged.
class SparseSystemCore {
 public:
  explicit SparseSystemCore(int n = 0) : n_(n) {}

  int size() const { return n_; }
  /// Adds v at (i, j) and, for i != j, at (j, i).
  void add_symmetric(int i, int j, double v);
  /// Adds v at (i, i).
  void add_diagonal(int i, double v) { add_symmetric(i, i, v); }

  SparseMatrix matrix() const;
  /// Upper-triangular part (diagonal included), the canonical symmetric storage.
  SparseMatrix upper() const;
  static SparseSystemCore from_upper(const SparseMatrix& upper);

 private:
  int n_;
  std::vector<Triplet> triplets_;
};

enum class SolverStrategy { Auto, Sparse, Dense };

struct SolveOptions {
  SolverStrategy strategy = SolverStrategy::Auto;
  /// Pivots below this (relative to the largest matrix entry) count as breakdown.
  double pivot_tolerance = 1e-13;
  /// Auto switches to the dense path below this dimension.
  int dense_threshold = 600;
  /// Sparse solves whose relative residual stays above this are reported as breakdown.
  double residual_tolerance = 1e-10;
};

struct SolveInfo {
  SolverStrategy used = SolverStrategy::Auto;
  double relative_residual = 0.0;
  int refinement_steps = 0;
};

/// Direct solve of a symmetric (possibly indefinite) system.
/// Throws SingularMatrixError naming the failing unknown.
Vector solve_saddle(const SparseMatrix& s, const Vector& rhs, const SolveOptions& opts = {},
                    SolveInfo* info = nullptr);

/// ||A x - b|| / ||b|| (or ||A x|| when b = 0).
double relative_residual(const SparseMatrix& a, const Vector& x, const Vector& b);

/// Max |A_ij - A_ji| over stored entries.
double max_asymmetry(const SparseMatrix& a);

}  // namespace ddiv
