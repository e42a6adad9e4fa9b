#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include "ddiv/error.hpp"
#include "ddiv/interp.hpp"
#include "ddiv/problems.hpp"
#include "ddiv/space.hpp"

using namespace ddiv;

namespace {

int formula(const Mesh& m) {
  return 4 * m.num_edges() + 4 * m.num_cells() - static_cast<int>(m.interior_vertices().size());
}

// Distinct global indices referenced by any cell, counted directly.
int referenced_globals(const DofMap& d) {
  std::set<int> s;
  for (int k = 0; k < d.num_cells(); ++k)
    for (int m = 0; m < kLocalDofs; ++m)
      for (const auto& e : d.local_entries(k, m)) s.insert(e.global);
  return static_cast<int>(s.size());
}

}  // namespace

TEST(DofMap, Counts) {
  const Mesh single = make_parallelogram_domain(example1_corners(), 0);
  EXPECT_EQ(DofMap(single).num_free(), 20);
  const Mesh e1 = make_parallelogram_domain(example1_corners(), 1);
  const DofMap d1(e1);
  EXPECT_EQ(d1.num_free(), 63);
  EXPECT_EQ(referenced_globals(d1), 63);
  for (int l = 0; l <= 3; ++l) {
    for (const Mesh& m : {make_lshape(l), make_parallelogram_domain(example1_corners(), l)}) {
      const DofMap d(m);
      EXPECT_EQ(d.num_free(), formula(m));
      EXPECT_EQ(referenced_globals(d), d.num_free());
      EXPECT_EQ(d.num_eliminated(), static_cast<int>(m.interior_vertices().size()));
    }
  }
}

TEST(DofMap, SharedEdgesUseSameGlobals) {
  const Mesh m = make_lshape(1);
  const DofMap d(m);
  for (int e = 0; e < m.num_edges(); ++e) {
    const auto& me = m.edge(e);
    if (me.cells[1] < 0) continue;
    std::array<std::set<int>, 2> g;
    for (int s = 0; s < 2; ++s) {
      const int k = me.cells[static_cast<std::size_t>(s)];
      for (int j = 0; j < 4; ++j)
        if (m.cell_edge(k, j) == e)
          for (int kind = 0; kind < 4; ++kind)
            g[static_cast<std::size_t>(s)].insert(d.local_entries(k, 4 * kind + j)[0].global);
    }
    EXPECT_EQ(g[0], g[1]);
    EXPECT_EQ(g[0].size(), 4u);
  }
}

TEST(DofMap, GatherScatter) {
  const Mesh m = make_parallelogram_domain(example1_corners(), 0);
  const DofMap d(m);
  Dof20 l = Dof20::LinSpaced(1.0, 20.0);
  Vector y = Vector::Zero(d.num_free());
  d.scatter(0, l, y);
  // Single cell: G is a signed permutation, so G^T G = I.
  EXPECT_EQ(d.gather(0, y), l);

  const Mesh m1 = make_parallelogram_domain(example1_corners(), 1);
  const DofMap d1(m1);
  const int v = m1.interior_vertices()[0];
  const auto& patch = m1.patch(v);
  Vector x = Vector::Zero(d1.num_free());
  double s = 0.0;
  for (std::size_t i = 1; i < patch.size(); ++i) {
    const double val = 0.5 + static_cast<double>(i);
    x(d1.jump_dof(patch[i].cell, patch[i].corner)) = val;
    s += val;
  }
  EXPECT_TRUE(d1.is_eliminated(patch[0].cell, patch[0].corner));
  EXPECT_EQ(patch[0].cell, 0);
  EXPECT_DOUBLE_EQ(d1.gather(patch[0].cell, x)(16 + patch[0].corner), -s);

  // Shared m0 dof lands on one global index from both sides.
  const auto& e = m1.edge(m1.cell_edge(0, 1));
  ASSERT_GE(e.cells[1], 0);
  std::set<int> targets;
  for (int c : e.cells) {
    int j = 0;
    while (m1.cell_edge(c, j) != m1.cell_edge(0, 1)) ++j;
    Dof20 u = Dof20::Zero();
    u(j) = 1.0;
    Vector z = Vector::Zero(d1.num_free());
    d1.scatter(c, u, z);
    for (int g = 0; g < z.size(); ++g)
      if (z(g) != 0.0) targets.insert(g);
  }
  EXPECT_EQ(targets.size(), 1u);
  EXPECT_THROW(d1.gather(0, Vector::Zero(3)), ParameterError);
  EXPECT_THROW(d1.jump_dof(99, 0), ParameterError);
}

TEST(DofMap, ScatterMatrixIsGtAG) {
  const Mesh m = make_parallelogram_domain(example1_corners(), 1);
  const DofMap d(m);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  Mat20 a;
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = u(rng);
  SparseSystemCore s(d.num_free());
  d.scatter_matrix(0, a, s);
  const DenseMatrix got(s.matrix());
  DenseMatrix g = DenseMatrix::Zero(20, d.num_free());
  for (int mm = 0; mm < 20; ++mm)
    for (const auto& e : d.local_entries(0, mm)) g(mm, e.global) += e.coeff;
  EXPECT_LT((got - g.transpose() * a * g).norm(), 1e-13);
}

TEST(Conformity, SmoothInterpolantPasses) {
  const TensorField f = plane_wave_field({{Eigen::Vector3d(1, 0.5, -0.3), Eigen::Vector2d(1.1, -0.4), 0.2}});
  for (const Mesh& m : {make_lshape(2), make_parallelogram_domain(example1_corners(), 2)}) {
    LocalBasisCache cache;
    const DofMap d(m);
    FieldState st{interpolate_ddiv(f, m, d), Vector()};
    const ConformityReport r = check_conformity(m, d, cache, st);
    EXPECT_LE(r.max_violation(), 1e-10);
  }
}

TEST(Conformity, RandomCellwiseFieldsFail) {
  const Mesh m = make_parallelogram_domain(example1_corners(), 2);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<SymTensorPoly> cells;
  for (int k = 0; k < m.num_cells(); ++k) {
    SymTensorPoly t;
    for (const auto& p : reference_basis()) t += u(rng) * p;
    cells.push_back(t);
  }
  const ConformityReport r = check_conformity(DiscreteField(m, cells));
  EXPECT_GT(r.max_violation(), 1e-2);
  EXPECT_GT(r.max_normal_moment, 1e-2);
  EXPECT_GT(r.max_jump_sum, 1e-2);
}

TEST(Conformity, ArbitraryGlobalCoefficientsPass) {
  const Mesh m = make_lshape(1);
  const DofMap d(m);
  LocalBasisCache cache;
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  FieldState st{Vector::NullaryExpr(d.num_free(), [&]() { return u(rng); }), Vector()};
  EXPECT_LE(check_conformity(m, d, cache, st).max_violation(), 1e-12);
}

TEST(DofMap, Dump) {
  const Mesh m = make_parallelogram_domain(example1_corners(), 1);
  const DofMap d(m);
  std::stringstream ss;
  d.dump(ss);
  const std::string s = ss.str();
  EXPECT_NE(s.find("free 63"), std::string::npos);
  EXPECT_NE(s.find("cell 0:"), std::string::npos);
  EXPECT_NE(s.find(" x"), std::string::npos);
}
