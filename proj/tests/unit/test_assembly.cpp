#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ddiv/assembly.hpp"
#include "ddiv/error.hpp"
#include "ddiv/problems.hpp"
#include "ddiv/quadrature.hpp"

using namespace ddiv;

namespace {

Mesh ex1(int level) { return make_parallelogram_domain(example1_corners(), level); }

Vector unit_vector(int n, int i) {
  Vector e = Vector::Zero(n);
  e(i) = 1.0;
  return e;
}

// Boundary functional <tr M, 1> evaluated on the mesh boundary: effective
// shear integrals minus corner jump sums at boundary vertices.
double boundary_functional(const DiscreteField& f) {
  const Mesh& m = f.mesh();
  const QuadRule& r = gauss_rule(6, 1);
  double s = 0.0;
  for (int k = 0; k < m.num_cells(); ++k) {
    const auto& c = m.cell(k);
    for (int j = 0; j < 4; ++j) {
      const Eigen::Vector2d p0 = m.vertex(c[static_cast<std::size_t>(j)]);
      const Eigen::Vector2d p1 = m.vertex(c[static_cast<std::size_t>((j + 1) % 4)]);
      const Eigen::Vector2d t = (p1 - p0).normalized(), n(t.y(), -t.x());
      if (m.edge(m.cell_edge(k, j)).kind != EdgeKind::Interior) {
        for (std::size_t g = 0; g < r.size(); ++g) {
          const Eigen::Vector2d x = 0.5 * (p0 + p1) + 0.5 * r.points[g][0] * (p1 - p0);
          const TensorJet jet = f.eval(k, x);
          const Eigen::Matrix2d dt = t.x() * jet.grad[0] + t.y() * jet.grad[1];
          s += 0.5 * (p1 - p0).norm() * r.weights[g] * (n.dot(jet.div) + t.dot(dt * n));
        }
      }
    }
    for (int j = 0; j < 4; ++j) {
      const int v = c[static_cast<std::size_t>(j)];
      if (m.vertex_kind(v) == VertexKind::Interior) continue;
      auto tn = [&](int e) {
        const Eigen::Vector2d a = m.vertex(c[static_cast<std::size_t>(e)]);
        const Eigen::Vector2d b = m.vertex(c[static_cast<std::size_t>((e + 1) % 4)]);
        const Eigen::Vector2d t = (b - a).normalized(), n(t.y(), -t.x());
        return t.dot(f.eval(k, m.vertex(v)).value * n);
      };
      s -= tn((j + 3) % 4) - tn(j);
    }
  }
  return s;
}

}  // namespace

TEST(Material, IdentityAndIsotropic) {
  const MaterialLaw id = MaterialLaw::identity();
  EXPECT_EQ(id.compliance(), Eigen::Matrix3d(Eigen::Vector3d(1, 2, 1).asDiagonal()));
  const MaterialLaw iso = MaterialLaw::isotropic(2.0, 0.3);
  Eigen::Matrix2d m, n;
  m << 1.0, 0.4, 0.4, -2.0;
  n << 0.3, -1.0, -1.0, 0.7;
  const Eigen::Vector3d mv(m(0, 0), m(0, 1), m(1, 1)), nv(n(0, 0), n(0, 1), n(1, 1));
  EXPECT_NEAR(nv.dot(iso.compliance() * mv), (n.array() * iso.apply(m).array()).sum(), 1e-14);
  // C^{-1} of the deviator and of the identity.
  const Eigen::Matrix2d dev = m - 0.5 * m.trace() * Eigen::Matrix2d::Identity();
  const Eigen::Matrix2d expected = 1.3 / 2.0 * dev + 0.7 / 2.0 * 0.5 * m.trace() * Eigen::Matrix2d::Identity();
  EXPECT_NEAR((iso.apply(m) - expected).norm(), 0.0, 1e-14);
  EXPECT_THROW(MaterialLaw::isotropic(-1.0, 0.3), MaterialError);
  EXPECT_THROW(MaterialLaw::isotropic(1.0, 0.5), MaterialError);
  EXPECT_THROW(MaterialLaw::isotropic(1.0, -1.0), MaterialError);
}

TEST(Assembly, SingleCellBlocks) {
  const Mesh m = ex1(0);
  const DofMap d(m);
  LocalBasisCache cache;
  for (const MaterialLaw& mat : {MaterialLaw::identity(), MaterialLaw::isotropic(3.0, 0.25)}) {
    const SaddleSystem s = assemble(m, d, mat, cache);
    const DenseMatrix a(s.A);
    ASSERT_EQ(a.rows(), 20);
    EXPECT_LE((a - a.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(a);
    EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
    Eigen::FullPivLU<DenseMatrix> lu{DenseMatrix(s.B)};
    EXPECT_EQ(lu.rank(), 3);
  }
}

TEST(Assembly, GlobalSymmetry) {
  const Mesh m = ex1(2);
  const DofMap d(m);
  LocalBasisCache cache;
  const SaddleSystem s = assemble(m, d, MaterialLaw::identity(), cache);
  EXPECT_LE(max_asymmetry(s.A), 1e-12);
  EXPECT_LE(max_asymmetry(s.matrix()), 1e-12);
}

TEST(Assembly, MassBlockMatchesQuadrature) {
  const Mesh m = make_lshape(1);
  const DofMap d(m);
  LocalBasisCache cache;
  const SaddleSystem s = assemble(m, d, MaterialLaw::identity(), cache);
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  const Vector x = Vector::NullaryExpr(d.num_free(), [&]() { return u(rng); });
  const DiscreteField f = DiscreteField::from_global(m, d, cache, x);
  const QuadRule& r = gauss_rule(6, 2);
  double e = 0.0;
  Vector bx = Vector::Zero(s.n_u);
  for (int k = 0; k < m.num_cells(); ++k)
    for (std::size_t g = 0; g < r.size(); ++g) {
      const Eigen::Vector2d xh(r.points[g][0], r.points[g][1]);
      const TensorJet j = f.eval_ref(k, xh);
      const double w = r.weights[g] * f.map(k).J;
      e += w * j.value.squaredNorm();
      bx.segment<3>(3 * k) += w * j.divdiv * Eigen::Vector3d(1, xh.x(), xh.y());
    }
  EXPECT_NEAR(x.dot(s.A * x), e, 1e-11 * e);
  EXPECT_LE((s.B * x - bx).norm(), 1e-11 * bx.norm());
}

TEST(Assembly, DivergenceTheoremIdentity) {
  const Mesh m = ex1(2);
  const DofMap d(m);
  LocalBasisCache cache;
  const SaddleSystem s = assemble(m, d, MaterialLaw::identity(), cache);
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u(-1, 1);
  const Vector x = Vector::NullaryExpr(d.num_free(), [&]() { return u(rng); });
  const Vector bx = s.B * x;
  double total = 0.0;
  for (int k = 0; k < m.num_cells(); ++k) total += bx(3 * k);
  const double bnd = boundary_functional(DiscreteField::from_global(m, d, cache, x));
  EXPECT_NEAR(total, bnd, 1e-10 * (1.0 + std::abs(bnd)));
}

TEST(DirichletLoad, ZeroData) {
  const Mesh m = ex1(1);
  const DofMap d(m);
  const Vector g = dirichlet_load(m, d, {[](const Eigen::Vector2d&) { return 0.0; },
                                         [](const Eigen::Vector2d&) { return Eigen::Vector2d(0, 0); }});
  EXPECT_EQ(g.norm(), 0.0);
  const ExactSolution e = exact_example1();
  EXPECT_LE(dirichlet_load(m, d, {e.u, e.grad_u}).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(DirichletLoad, MatchesTracePairingOracle) {
  // <tr(Psi), z> = (div div Psi, z) - (Psi, grad grad z) for z smooth on the
  // closed domain, all boundary edges Dirichlet.
  auto z = [](const Eigen::Vector2d& x) { return std::sin(x.x()) * std::cos(0.5 * x.y()) + x.x() * x.x() * x.y(); };
  auto gz = [](const Eigen::Vector2d& x) {
    return Eigen::Vector2d(std::cos(x.x()) * std::cos(0.5 * x.y()) + 2 * x.x() * x.y(),
                           -0.5 * std::sin(x.x()) * std::sin(0.5 * x.y()) + x.x() * x.x());
  };
  auto hz = [](const Eigen::Vector2d& x) {
    Eigen::Matrix2d h;
    const double xy = -0.5 * std::cos(x.x()) * std::sin(0.5 * x.y()) + 2 * x.x();
    h << -std::sin(x.x()) * std::cos(0.5 * x.y()) + 2 * x.y(), xy, xy, -0.25 * std::sin(x.x()) * std::cos(0.5 * x.y());
    return h;
  };
  for (const Mesh& m : {ex1(0), ex1(1)}) {
    const DofMap d(m);
    LocalBasisCache cache;
    const Vector load = dirichlet_load(m, d, {z, gz}, 8);
    const QuadRule& r = gauss_rule(12, 2);
    for (int g = 0; g < d.num_free(); ++g) {
      const DiscreteField psi = DiscreteField::from_global(m, d, cache, unit_vector(d.num_free(), g));
      double v = 0.0;
      for (int k = 0; k < m.num_cells(); ++k)
        for (std::size_t q = 0; q < r.size(); ++q) {
          const Eigen::Vector2d xh(r.points[q][0], r.points[q][1]);
          const Eigen::Vector2d x = psi.map(k)(xh);
          const TensorJet j = psi.eval_ref(k, xh);
          v += r.weights[q] * psi.map(k).J * (j.divdiv * z(x) - (j.value.array() * hz(x).array()).sum());
        }
      EXPECT_NEAR(load(g), v, 1e-10) << "dof " << g;
    }
  }
}

TEST(DirichletLoad, AffineDataOnInterpolant) {
  const Mesh m = ex1(2);
  const DofMap d(m);
  LocalBasisCache cache;
  auto g = [](const Eigen::Vector2d& x) { return 0.5 + x.x() - 2 * x.y(); };
  auto gg = [](const Eigen::Vector2d&) { return Eigen::Vector2d(1, -2); };
  const Vector load = dirichlet_load(m, d, {g, gg});
  const TensorField f = plane_wave_field({{Eigen::Vector3d(0.2, -0.4, 1.0), Eigen::Vector2d(0.7, 0.3), 0.1}});
  const Vector x = interpolate_ddiv(f, m, d);
  const DiscreteField mh = DiscreteField::from_global(m, d, cache, x);
  const QuadRule& r = gauss_rule(4, 2);
  double v = 0.0;
  for (int k = 0; k < m.num_cells(); ++k)
    for (std::size_t q = 0; q < r.size(); ++q) {
      const Eigen::Vector2d xh(r.points[q][0], r.points[q][1]);
      v += r.weights[q] * mh.map(k).J * mh.eval_ref(k, xh).divdiv * g(mh.map(k)(xh));
    }
  EXPECT_NEAR(load.dot(x), v, 1e-10 * (1.0 + std::abs(v)));
}

TEST(Neumann, RowsAndValues) {
  const Mesh m = make_lshape(1);
  const DofMap d(m);
  const ExactSolution e = exact_example2();
  const auto rows = neumann_constraints(m, d, e.moment);
  int neumann_interior = 0;
  for (int v = 0; v < m.num_vertices(); ++v) neumann_interior += m.vertex_kind(v) == VertexKind::NeumannInterior;
  EXPECT_EQ(static_cast<int>(rows.size()), 4 * m.count_edges(EdgeKind::Neumann) + neumann_interior);
  const QuadRule& r = gauss_rule(16, 1);
  for (int ei = 0; ei < m.num_edges(); ++ei) {
    const auto& me = m.edge(ei);
    if (me.kind != EdgeKind::Neumann) continue;
    const Eigen::Vector2d a = m.vertex(me.v[0]), b = m.vertex(me.v[1]);
    const Eigen::Vector2d t = (b - a).normalized(), n(t.y(), -t.x());
    double m0 = 0.0;
    for (std::size_t q = 0; q < r.size(); ++q) {
      const Eigen::Vector2d x = 0.5 * (a + b) + 0.5 * r.points[q][0] * (b - a);
      m0 += 0.5 * (b - a).norm() * r.weights[q] * n.dot(e.moment.jet(x).value * n);
    }
    bool found = false;
    for (const auto& row : rows)
      if (row.entries.size() == 1 && row.entries[0].global == d.edge_dof(ei, 0)) {
        EXPECT_NEAR(row.value, m0, 1e-8);
        found = true;
      }
    EXPECT_TRUE(found);
  }
  EXPECT_THROW(neumann_constraints(ex1(1), DofMap(ex1(1)), e.moment), PartitionError);
}

TEST(Neumann, ZeroDataGivesZeroConstrainedDofs) {
  const Mesh m = make_lshape(1);
  const DofMap d(m);
  LocalBasisCache cache;
  SaddleSystem s = assemble(m, d, MaterialLaw::identity(), cache);
  TensorField zero;
  zero.jet = [](const Eigen::Vector2d&) { return TensorJet{}; };
  const auto rows = neumann_constraints(m, d, zero);
  set_constraints(s, rows);
  s.f_load = load_f(m, [](const Eigen::Vector2d& x) { return 1.0 + x.x(); });
  const SolveResult res = solve_problem(s);
  for (const auto& row : rows)
    if (row.entries.size() == 1) EXPECT_LE(std::abs(res.state.m(row.entries[0].global)), 1e-10);
  EXPECT_LE(check_conformity(m, d, cache, res.state).max_violation(), 1e-9);
}

TEST(Solve, Example1SingleCell) {
  const Mesh m = ex1(0);
  const DofMap d(m);
  LocalBasisCache cache;
  SaddleSystem s = assemble(m, d, MaterialLaw::identity(), cache);
  s.f_load = load_f(m, exact_example1().f);
  EXPECT_EQ(s.size(), 23);
  SolveOptions sp, de;
  sp.strategy = SolverStrategy::Sparse;
  de.strategy = SolverStrategy::Dense;
  const SolveResult a = solve_problem(s, sp);
  const SolveResult b = solve_problem(s, de);
  EXPECT_LE((a.state.m - b.state.m).norm(), 1e-10 * (1.0 + b.state.m.norm()));
  EXPECT_LE((a.state.u - b.state.u).norm(), 1e-10 * (1.0 + b.state.u.norm()));
  EXPECT_LE(a.info.relative_residual, 1e-10);
}

TEST(Solve, SecondEquationHolds) {
  const Mesh m = ex1(3);
  const DofMap d(m);
  LocalBasisCache cache;
  const ExactSolution e = exact_example1();
  SaddleSystem s = assemble(m, d, MaterialLaw::identity(), cache);
  s.f_load = load_f(m, e.f);
  const SolveResult res = solve_problem(s);
  const DiscreteField mh = DiscreteField::from_global(m, d, cache, res.state.m);
  const QuadRule& r = gauss_rule(8, 2);
  double worst = 0.0;
  for (int k = 0; k < m.num_cells(); ++k) {
    Eigen::Vector3d lhs = Eigen::Vector3d::Zero(), rhs = Eigen::Vector3d::Zero();
    for (std::size_t q = 0; q < r.size(); ++q) {
      const Eigen::Vector2d xh(r.points[q][0], r.points[q][1]);
      const double w = r.weights[q] * mh.map(k).J;
      const Eigen::Vector3d p(1, xh.x(), xh.y());
      lhs += w * mh.eval_ref(k, xh).divdiv * p;
      rhs += w * e.f(mh.map(k)(xh)) * p;
    }
    worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  EXPECT_LE(worst, 1e-9);
  EXPECT_LE(check_conformity(m, d, cache, res.state).max_violation(), 1e-9);
}

TEST(Solve, LinearLoadIsMatchedExactly) {
  const Mesh m = make_lshape(2);
  const DofMap d(m);
  LocalBasisCache cache;
  SaddleSystem s = assemble(m, d, MaterialLaw::identity(), cache);
  auto f = [](const Eigen::Vector2d& x) { return 2.0 - 3.0 * x.x() + x.y(); };
  s.f_load = load_f(m, f);
  const SolveResult res = solve_problem(s);
  const ScalarFieldP1 dd = discrete_divdiv(DiscreteField::from_global(m, d, cache, res.state.m));
  EXPECT_LE(p1_l2_distance(m, dd, project_p1(f, m)), 1e-9);
}

TEST(InfSup, BoundedAwayFromZero) {
  LocalBasisCache cache;
  for (int level = 0; level <= 3; ++level) {
    const Mesh m = ex1(level);
    const DofMap d(m);
    const double beta = infsup_constant(m, assemble(m, d, MaterialLaw::identity(), cache));
    EXPECT_GT(beta, 1e-3) << "level " << level;
    EXPECT_LE(beta, 1.0 + 1e-12);
  }
}
