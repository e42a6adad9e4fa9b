#pragma once

#include <iosfwd>
#include <vector>

#include "ddiv/linalg.hpp"
#include "ddiv/mesh.hpp"
#include "ddiv/piola.hpp"

namespace ddiv {

/// Global numbering of the lowest-order H(div div) space.  Edge e owns the
/// four dofs 4e..4e+3 (m0, m1, q0, q1 in the global edge orientation); then
/// one jump dof per cell corner follows, except that at each interior vertex
/// the jump of the lowest-index patch cell is eliminated as minus the sum of
/// the others.
class DofMap {
 public:
  struct Entry {
    int global;
    double coeff;
  };

  explicit DofMap(const Mesh& m);

  int num_free() const { return num_free_; }
  int num_cells() const { return static_cast<int>(cell_edges_.size()); }
  int num_edge_dofs() const { return 4 * num_edges_; }
  /// Global index of edge dof kind (0..3) on edge e.
  int edge_dof(int e, int kind) const { return 4 * e + kind; }
  /// Global jump index of (cell, corner), -1 if eliminated.
  int jump_dof(int cell, int corner) const;
  bool is_eliminated(int cell, int corner) const { return jump_dof(cell, corner) < 0; }
  int num_eliminated() const { return num_eliminated_; }

  /// Local dof m of a cell as a combination of global dofs.
  std::vector<Entry> local_entries(int cell, int m) const;

  /// Local (cell-oriented) dof values from global coefficients.
  Dof20 gather(int cell, const Vector& x) const;
  /// y += G_K^T local.
  void scatter(int cell, const Dof20& local, Vector& y) const;
  /// Adds G_K^T a G_K to the symmetric core.
  void scatter_matrix(int cell, const Mat20& a, SparseSystemCore& s) const;
  /// Per-row scatter of a 3x20 block (rows offset by row0) as symmetric couplings.
  void scatter_rows(int cell, const Eigen::Matrix<double, 3, kLocalDofs>& b, int row0,
                    SparseSystemCore& s) const;

  /// Text dump: edge lines "edge e: g0 g1 g2 g3" and cell lines with jump ids,
  /// eliminated entries shown as "x".
  void dump(std::ostream& os) const;

 private:
  struct LocalMap {
    std::array<Entry, kLocalDofs> direct{};
    /// For eliminated jumps: the surviving jumps at that vertex.
    std::array<std::vector<int>, 4> eliminated_from;
  };

  int num_edges_ = 0;
  int num_free_ = 0;
  int num_eliminated_ = 0;
  std::vector<std::array<int, 4>> cell_edges_;
  std::vector<std::array<int, 4>> jumps_;
  std::vector<LocalMap> local_;
};

/// Discrete pair: moment coefficients over the free dofs and three
/// coefficients per cell of the deflection in the pulled-back basis 1, x^, y^.
struct FieldState {
  Vector m;
  Vector u;
};

/// Cellwise polynomial representation of a moment field.
class DiscreteField {
 public:
  DiscreteField(const Mesh& mesh, std::vector<SymTensorPoly> mhat);
  /// Expands global coefficients through the dof map.
  static DiscreteField from_global(const Mesh& mesh, const DofMap& dofs, LocalBasisCache& cache,
                                   const Vector& m);

  const Mesh& mesh() const { return *mesh_; }
  const ElementMap& map(int cell) const { return maps_[static_cast<std::size_t>(cell)]; }
  const SymTensorPoly& reference(int cell) const { return mhat_[static_cast<std::size_t>(cell)]; }
  TensorJet eval_ref(int cell, const Eigen::Vector2d& xhat) const;
  TensorJet eval(int cell, const Eigen::Vector2d& x) const;

 private:
  const Mesh* mesh_;
  std::vector<ElementMap> maps_;
  std::vector<SymTensorPoly> mhat_;
};

struct ConformityReport {
  /// Largest mismatch of <n.Mn, p> between the two sides of an interior edge.
  double max_normal_moment = 0.0;
  /// Largest |<trq_1, p> + <trq_2, p>| in outward orientations.
  double max_shear_moment = 0.0;
  /// Largest |sum of corner jumps| over interior vertex patches.
  double max_jump_sum = 0.0;
  double max_violation() const;
  bool passed(double tol) const { return max_violation() <= tol; }
};

/// Interface and patch checks by pointwise evaluation; the shear trace is
/// formed from the physical gradient, not from the dof formulas.
ConformityReport check_conformity(const DiscreteField& field, int edge_order = 6);
ConformityReport check_conformity(const Mesh& mesh, const DofMap& dofs, LocalBasisCache& cache,
                                  const FieldState& state);

}  // namespace ddiv
