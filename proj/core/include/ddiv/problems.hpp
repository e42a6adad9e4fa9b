#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ddiv/assembly.hpp"
#include "ddiv/interp.hpp"
#include "ddiv/mesh.hpp"
#include "ddiv/poly.hpp"
#include "ddiv/space.hpp"

namespace ddiv {

enum class ProblemId { Ex1, Ex2 };

ProblemId parse_problem(const std::string& name);
std::string problem_name(ProblemId id);

/// Deflection u with M = grad grad u, div M and f = div div M.
struct ExactSolution {
  ProblemId id = ProblemId::Ex1;
  ScalarFunction u;
  std::function<Eigen::Vector2d(const Eigen::Vector2d&)> grad_u;
  TensorField moment;
  ScalarFunction f;
  /// Singular exponent and constant; NaN for smooth problems.
  double alpha = 0.0;
  double c = 0.0;
  Eigen::Vector2d singular_point = Eigen::Vector2d::Zero();
  bool singular = false;
};

/// u = (x^2-1)^2 ((x-y)^2-1)^2 on the parallelogram between |x| = 1 and |x - y| = 1.
ExactSolution exact_example1();
/// The polynomial behind exact_example1.
Poly2 example1_polynomial();
/// Corners of the Example 1 parallelogram, counterclockwise.
std::array<Eigen::Vector2d, 4> example1_corners();

struct CornerConstants {
  double alpha;
  double c;
};

/// Smallest positive exponent of a clamped-clamped corner of opening omega
/// (3 pi / 2 for the L-shape): solves the clamped eigen-equation by bisection.
/// Throws ConfigurationError when no root is bracketed in (0, 1).
CornerConstants clamped_corner_constants(double opening);

/// Corner singular function u = r^{1+a} (cos((a+1) psi) + C cos((a-1) psi)),
/// psi = phi - pi/4, with phi in [-pi/2, 3pi/2).
ExactSolution exact_example2();

ExactSolution exact_solution(ProblemId id);
Mesh problem_mesh(ProblemId id, int level);

struct ErrorTuple {
  double u = 0.0;
  double M = 0.0;
  /// NaN when the column is omitted.
  double ddiv = 0.0;
  double div = 0.0;
};

struct ErrorOptions {
  int order = 6;
  /// Used on cells touching the singular point, which are split into
  /// corner_layers geometrically graded layers towards it.
  int corner_order = 10;
  int corner_layers = 20;
};

ErrorTuple l2_errors(const DiscreteField& mh, const ScalarFieldP1& uh, const ExactSolution& exact,
                     const ErrorOptions& opts = {});

struct RunOptions {
  SolveOptions solve;
  ErrorOptions errors;
  int load_order = 6;
  int boundary_order = 8;
};

struct LevelResult {
  int level = 0;
  int cells = 0;
  int free_dofs = 0;
  int unknowns = 0;
  double h = 0.0;
  ErrorTuple err;
  double divdiv_norm = 0.0;
  double m_norm = 0.0;
  ConformityReport conformity;
  SolveInfo info;
  FieldState state;
};

/// Builds, solves and measures one level.  The mesh and dof map are returned
/// through the optional pointers.
LevelResult solve_level(ProblemId id, int level, const RunOptions& opts, LocalBasisCache& cache,
                        Mesh* mesh_out = nullptr);

struct ConvergenceRow {
  int level = 0;
  int nelem = 0;
  double h = 0.0;
  double err_u = 0.0, eoc_u = 0.0;
  double err_M = 0.0, eoc_M = 0.0;
  double err_ddiv = 0.0, eoc_ddiv = 0.0;
  double err_div = 0.0, eoc_div = 0.0;
};

struct ConvergenceReport {
  ProblemId id = ProblemId::Ex1;
  std::vector<LevelResult> levels;
  std::vector<ConvergenceRow> rows;
};

ConvergenceReport convergence_study(ProblemId id, int min_level, int max_level, const RunOptions& opts = {});

/// Columns level,nelem,h,err_u,eoc_u,err_M,eoc_M,err_ddiv,eoc_ddiv,err_div,eoc_div;
/// numbers with 17 significant digits, undefined entries as "nan", omitted
/// columns as "omitted".
void write_convergence_csv(std::ostream& os, const ConvergenceReport& report);

/// Shortest round-trip formatting used by every text output.
std::string format_double(double v);

/// Samples u_h, M_h, div M_h and div div M_h on an s x s grid per cell.
void write_solution_csv(std::ostream& os, const DiscreteField& mh, const ScalarFieldP1& uh, int samples);

}  // namespace ddiv
