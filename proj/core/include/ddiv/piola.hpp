#pragma once

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <mutex>

#include "ddiv/mesh.hpp"
#include "ddiv/refelement.hpp"

namespace ddiv {

/// Affine map F(x^) = B x^ + a from (-1,1)^2 onto a parallelogram cell.
struct ElementMap {
  Eigen::Matrix2d B = Eigen::Matrix2d::Identity();
  Eigen::Vector2d a = Eigen::Vector2d::Zero();
  double J = 1.0;

  Eigen::Vector2d operator()(const Eigen::Vector2d& xhat) const { return B * xhat + a; }
  Eigen::Vector2d inverse(const Eigen::Vector2d& x) const { return B.inverse() * (x - a); }
};

/// Map sending reference corner i to corners[i].  Throws GeometryError if B is singular.
ElementMap element_map(const std::array<Eigen::Vector2d, 4>& corners);
ElementMap element_map(const Mesh& m, int cell);

/// Pointwise data of a symmetric tensor field: value, row-wise divergence,
/// div div and the partial derivatives d/dx, d/dy.
struct TensorJet {
  Eigen::Matrix2d value = Eigen::Matrix2d::Zero();
  Eigen::Vector2d div = Eigen::Vector2d::Zero();
  double divdiv = 0.0;
  std::array<Eigen::Matrix2d, 2> grad{Eigen::Matrix2d::Zero(), Eigen::Matrix2d::Zero()};
};

/// Field evaluated at physical points.
using TensorEvaluator = std::function<TensorJet(const Eigen::Vector2d& x)>;

/// B M^(x^) B^T / |J|, the value of the transformed tensor at F(x^).
Eigen::Matrix2d push_tensor(const ElementMap& map, const SymTensorPoly& mhat, const Eigen::Vector2d& xhat);

/// Full jet of the transformed tensor at F(x^).
TensorJet push_jet(const ElementMap& map, const SymTensorPoly& mhat, const Eigen::Vector2d& xhat);

/// Dof functionals of a cell in its own orientation: outward normal,
/// counterclockwise tangent, edge Legendre polynomial increasing along the
/// traversal.  Effective-shear moments use integration by parts, so only
/// values and divergences are evaluated; jumps are point traces at the corners.
Dof20 local_dofs(const ElementMap& map, const TensorEvaluator& field, int edge_order = 4);
Dof20 local_dofs(const ElementMap& map, const SymTensorPoly& mhat, int edge_order = 4);

/// Per-cell view of the global dof orientation.
struct PhysicalDofFrame {
  std::array<int, 4> edges{};
  /// +1 where the outward normal of local edge j equals the global edge normal.
  std::array<int, 4> sigma{};
  std::array<Eigen::Vector2d, 4> global_normal;
  /// Factor taking local dof values to global ones (and back, being +-1).
  Dof20 local_to_global = Dof20::Ones();
};

PhysicalDofFrame dof_frame(const Mesh& m, int cell);

/// Global physical dofs of the transformed tensor on the cell.
Dof20 physical_dofs(const ElementMap& map, const PhysicalDofFrame& frame, const SymTensorPoly& mhat);

/// T[m][i] = local dof m of H(Phi_i) and its inverse.  Local shape functions
/// dual to the local dofs are Psi_j = sum_i Tinv(i, j) H(Phi_i).
struct LocalBasis {
  Mat20 T;
  Mat20 Tinv;
  double condition = 1.0;
};

constexpr double kMaxBasisCondition = 1e8;

/// Throws GeometryError when the condition number exceeds kMaxBasisCondition.
LocalBasis local_basis_matrix(const ElementMap& map);

/// Write-once cache of LocalBasis keyed by B (translations do not change T).
class LocalBasisCache {
 public:
  std::shared_ptr<const LocalBasis> get(const ElementMap& map);
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::array<double, 4>, std::shared_ptr<const LocalBasis>> cache_;
};

/// Reference tensor whose transform has the given local dof values.
SymTensorPoly reference_tensor(const LocalBasis& basis, const Dof20& local);

}  // namespace ddiv
