#pragma once

#include <Eigen/Dense>

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "ddiv/poly.hpp"

namespace ddiv {

/// Symmetric 2x2 tensor with polynomial entries on the reference square.
/// Symmetry is structural: only xx, xy and yy are stored.
struct SymTensorPoly {
  Poly2 xx{3};
  Poly2 xy{3};
  Poly2 yy{3};

  Eigen::Matrix2d operator()(double x, double y) const;
  /// Row-wise divergence (d_x xx + d_y xy, d_x xy + d_y yy).
  std::array<Poly2, 2> div() const;

  SymTensorPoly& operator+=(const SymTensorPoly& o);
  SymTensorPoly& operator*=(double s);
  friend SymTensorPoly operator*(double s, SymTensorPoly t) { return t *= s; }
};

/// d_xx M_xx + 2 d_xy M_xy + d_yy M_yy.
Poly2 ref_divdiv(const SymTensorPoly& m);

/// True iff every entry lies in the monomial pattern of the lowest-order space:
/// xx in P^{1,1} + <x^2, x^3>, xy in P^2 + <x^2 y, x y^2>, yy in P^{1,1} + <y^2, y^3>.
bool in_x0_space(const SymTensorPoly& m);

/// One edge of (-1, 1)^2, traversed counterclockwise.  Points on the edge are
/// midpoint + s * tangent for s in [-1, 1]; the edge Legendre polynomial is s.
struct RefEdge {
  Eigen::Vector2d start;
  Eigen::Vector2d end;
  Eigen::Vector2d midpoint;
  Eigen::Vector2d normal;   // outward unit normal
  Eigen::Vector2d tangent;  // counterclockwise unit tangent
};

/// Edges 0..3 are the south, east, north and west sides; edge j runs from
/// corner j to corner (j + 1) % 4 with corners (-1,-1), (1,-1), (1,1), (-1,1).
const std::array<RefEdge, 4>& reference_edges();
Eigen::Vector2d reference_corner(int corner);

/// Normal-normal trace n.Mn on an edge as a polynomial in the edge parameter s.
Poly1 ref_trace_nn(const SymTensorPoly& m, int edge);
/// Effective shear n.div M + d_t(t.Mn), computed by differentiation then restriction.
Poly1 ref_trace_shear(const SymTensorPoly& m, int edge);
/// Tangential-normal trace t.Mn on an edge.
Poly1 ref_trace_tn(const SymTensorPoly& m, int edge);
/// Jump (t.Mn)|_e(c) - (t.Mn)|_e'(c) where e ends and e' starts at corner c.
double ref_corner_jump(const SymTensorPoly& m, int corner);

constexpr int kLocalDofs = 20;
using Dof20 = Eigen::Matrix<double, kLocalDofs, 1>;
using Mat20 = Eigen::Matrix<double, kLocalDofs, kLocalDofs>;

/// Dof layout: [0,4) <n.Mn, 1>, [4,8) <n.Mn, l>, [8,12) <q, 1>, [12,16) <q, l>,
/// [16,20) corner jumps.  Entry 4*kind + j refers to edge or corner j.
enum class DofKind { NormalMoment0 = 0, NormalMoment1 = 1, ShearMoment0 = 2, ShearMoment1 = 3, Jump = 4 };
constexpr int dof_index(DofKind kind, int j) { return 4 * static_cast<int>(kind) + j; }

/// Raw (unnormalized) reference dofs of m; edge moments are exact integrals.
Dof20 reference_dofs(const SymTensorPoly& m);

/// Value of dof i on its own basis tensor: <1,1> = 2, <l,l> = 2/3, jumps 1.
double dof_normalization(int dof);

/// The twenty reference shape tensors, in dof order.
std::array<SymTensorPoly, kLocalDofs> build_reference_basis();
/// Process-wide immutable copy of build_reference_basis().
const std::array<SymTensorPoly, kLocalDofs>& reference_basis();

struct UnisolvencyReport {
  Mat20 raw;         // raw(dof, basis)
  Mat20 normalized;  // rows divided by dof_normalization
  double max_deviation = 0.0;
  std::vector<std::pair<int, int>> offending;  // (dof, basis) pairs above tolerance
  bool passed = false;
};

UnisolvencyReport verify_unisolvency(std::span<const SymTensorPoly, kLocalDofs> basis,
                                     double tol = 1e-12);

/// One sample point: tensor entries, divergence and div div.
struct FieldSample {
  double x, y;
  double mxx, mxy, myy;
  double div_x, div_y;
  double divdiv;
};

/// Samples m on a grid x grid lattice covering [-1, 1]^2 (corners included).
std::vector<FieldSample> sample_reference_field(const SymTensorPoly& m, int grid);

}  // namespace ddiv
