#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ddiv/mesh.hpp"
#include "ddiv/piola.hpp"
#include "ddiv/space.hpp"

namespace ddiv {

using ScalarFunction = std::function<double(const Eigen::Vector2d& x)>;

/// Point-evaluable symmetric tensor field; the jet must supply value,
/// divergence, div div and gradient.
struct TensorField {
  TensorEvaluator jet;
  std::string tag;
};

/// One term amp * sin(k.x + phase) of a trigonometric tensor field; amp holds (xx, xy, yy).
struct PlaneWave {
  Eigen::Vector3d amp;
  Eigen::Vector2d k;
  double phase = 0.0;
};

/// Sum of plane waves with exact jets.
TensorField plane_wave_field(std::vector<PlaneWave> waves);
/// Random field with wave numbers of modulus at most kmax.
TensorField random_plane_wave_field(std::mt19937_64& rng, int terms = 3, double kmax = 2.0);

/// Piecewise linear scalar with three coefficients per cell in the
/// pulled-back basis 1, x^, y^.
struct ScalarFieldP1 {
  Vector coeffs;

  double eval_ref(int cell, const Eigen::Vector2d& xhat) const;
};

/// Reference mass of the basis 1, x^, y^ on (-1,1)^2.
inline const Eigen::Vector3d& p1_reference_mass() {
  static const Eigen::Vector3d m(4.0, 4.0 / 3.0, 4.0 / 3.0);
  return m;
}

/// Cellwise L2 projection onto linear polynomials (order x order Gauss).
ScalarFieldP1 project_p1(const ScalarFunction& f, const Mesh& mesh, int order = 6);

/// Canonical interpolant: global dofs taken from the field's own traces.
Vector interpolate_ddiv(const TensorField& field, const Mesh& mesh, const DofMap& dofs, int edge_order = 6);

/// div div of a discrete field, exactly in P1 cellwise.
ScalarFieldP1 discrete_divdiv(const DiscreteField& field);

/// L2 norm of the difference of two cellwise P1 fields.
double p1_l2_distance(const Mesh& mesh, const ScalarFieldP1& a, const ScalarFieldP1& b);

/// ||M - M_h||_L2 by order x order Gauss on every cell.
double tensor_l2_error(const TensorField& exact, const DiscreteField& approx, int order = 6);

/// Interpolation residuals on one mesh.
struct InterpolationCheck {
  double err_M = 0.0;
  /// ||div div Pi M - Pi1 div div M||.
  double commuting = 0.0;
  /// ||div div M|| for scaling.
  double divdiv_norm = 0.0;
  ConformityReport conformity;
};

InterpolationCheck check_interpolation(const TensorField& field, const Mesh& mesh, LocalBasisCache& cache,
                                       int edge_order = 6, int volume_order = 6);

struct InterpolationRow {
  int level = 0;
  int cells = 0;
  double h = 0.0;
  double err_M = 0.0;
  /// NaN on the first row or when either error is at rounding level.
  double eoc = 0.0;
  double commuting = 0.0;
};

using MeshFactory = std::function<Mesh(int level)>;

std::vector<InterpolationRow> interpolation_error_study(const TensorField& field, const MeshFactory& meshes,
                                                        int min_level, int max_level);

/// log2(coarse / fine), NaN when undefined or both errors are below floor.
double eoc(double coarse, double fine, double floor = 1e-13);

}  // namespace ddiv
