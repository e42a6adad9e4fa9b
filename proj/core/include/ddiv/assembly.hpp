#pragma once

#include <functional>
#include <vector>

#include "ddiv/interp.hpp"
#include "ddiv/linalg.hpp"
#include "ddiv/mesh.hpp"
#include "ddiv/piola.hpp"
#include "ddiv/space.hpp"

namespace ddiv {

/// Compliance C^{-1} acting on symmetric 2x2 tensors.
class MaterialLaw {
 public:
  enum class Mode { Identity, Isotropic };

  static MaterialLaw identity() { return MaterialLaw(); }
  /// C^{-1} M = (1+nu)/E dev M + (1-nu)/E (tr M / 2) I.  Throws MaterialError
  /// unless E > 0 and nu lies in (-1, 1/2).
  static MaterialLaw isotropic(double young, double poisson);

  Mode mode() const { return mode_; }
  double young() const { return young_; }
  double poisson() const { return poisson_; }

  /// Matrix Q with N : C^{-1} M = n^T Q m for m = (M_xx, M_xy, M_yy).
  const Eigen::Matrix3d& compliance() const { return q_; }
  Eigen::Matrix2d apply(const Eigen::Matrix2d& m) const;

 private:
  MaterialLaw();
  Mode mode_ = Mode::Identity;
  double young_ = 1.0;
  double poisson_ = 0.0;
  Eigen::Matrix3d q_;
};

struct AssemblyOptions {
  /// Gauss points per direction for the volume load.
  int load_order = 6;
  /// Gauss points for boundary data integrals.
  int boundary_order = 6;
};

/// Blocks of the discrete mixed system
///   [A  B^T L^T] [ x]   [-G]
///   [B  0   0  ] [-u] = [ F]
///   [L  0   0  ] [ l]   [ N]
/// with x the moment dofs, u the cellwise P1 deflection and l multipliers.
struct SaddleSystem {
  int n_m = 0;
  int n_u = 0;
  int n_c = 0;
  SparseMatrix A;
  SparseMatrix B;
  SparseMatrix L;
  Vector g_load;
  Vector f_load;
  Vector n_values;

  int size() const { return n_m + n_u + n_c; }
  SparseMatrix matrix() const;
  Vector rhs() const;
};

/// Assembles A and B; loads are zero until set.
SaddleSystem assemble(const Mesh& mesh, const DofMap& dofs, const MaterialLaw& material,
                      LocalBasisCache& cache);

/// <f, p> for the pulled-back P1 basis of every cell.
Vector load_f(const Mesh& mesh, const ScalarFunction& f, int order = 6);

struct DirichletData {
  ScalarFunction g;
  std::function<Eigen::Vector2d(const Eigen::Vector2d&)> grad_g;
};

/// Boundary pairing <tr(dM), g> over the Dirichlet part for each free dof.
Vector dirichlet_load(const Mesh& mesh, const DofMap& dofs, const DirichletData& data, int order = 6);

struct ConstraintRow {
  std::vector<DofMap::Entry> entries;
  double value = 0.0;
};

/// Essential Neumann conditions: the four global dofs of every Neumann edge and,
/// at each vertex interior to the Neumann part, the sum of the patch jumps,
/// taken from the traces of the given field.
std::vector<ConstraintRow> neumann_constraints(const Mesh& mesh, const DofMap& dofs, const TensorField& data,
                                               int edge_order = 8);

void set_constraints(SaddleSystem& sys, const std::vector<ConstraintRow>& rows);

struct SolveResult {
  FieldState state;
  Vector multipliers;
  SolveInfo info;
};

SolveResult solve_problem(const SaddleSystem& sys, const SolveOptions& opts = {});

/// Discrete inf-sup constant of B in the norms ||M||^2 + ||div div M||^2 and
/// ||u||: the square root of the smallest generalized eigenvalue of
/// B X^{-1} B^T against the u mass matrix.  Dense; intended for small meshes.
double infsup_constant(const Mesh& mesh, const SaddleSystem& sys);

/// Cellwise P1 mass matrix diagonal (the pulled-back basis is orthogonal).
Vector p1_mass_diagonal(const Mesh& mesh);

}  // namespace ddiv
