#include "ddiv/assembly.hpp"

#include <cmath>
#include <map>
#include <string>

#include "ddiv/error.hpp"
#include "ddiv/quadrature.hpp"

namespace ddiv {

MaterialLaw::MaterialLaw() { q_ = Eigen::Vector3d(1.0, 2.0, 1.0).asDiagonal(); }

MaterialLaw MaterialLaw::isotropic(double young, double poisson) {
  if (!(young > 0.0)) throw MaterialError("Young's modulus must be positive, got " + std::to_string(young));
  if (!(poisson > -1.0 && poisson < 0.5))
    throw MaterialError("Poisson ratio must lie in (-1, 1/2), got " + std::to_string(poisson));
  MaterialLaw m;
  m.mode_ = Mode::Isotropic;
  m.young_ = young;
  m.poisson_ = poisson;
  const double a = (1.0 + poisson) / young;
  const double b = poisson / young;
  m.q_ << a - b, 0.0, -b, 0.0, 2.0 * a, 0.0, -b, 0.0, a - b;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(m.q_);
  if (!(eig.eigenvalues().minCoeff() > 0.0)) throw MaterialError("compliance is not positive definite");
  return m;
}

Eigen::Matrix2d MaterialLaw::apply(const Eigen::Matrix2d& m) const {
  if (mode_ == Mode::Identity) return m;
  const double tr = m.trace();
  return (1.0 + poisson_) / young_ * m - poisson_ / young_ * tr * Eigen::Matrix2d::Identity();
}

SparseMatrix SaddleSystem::matrix() const {
  SparseSystemCore s(size());
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(A, k); it; ++it)
      if (it.row() <= it.col()) s.add_symmetric(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  for (int k = 0; k < B.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(B, k); it; ++it)
      s.add_symmetric(n_m + static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  for (int k = 0; k < L.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(L, k); it; ++it)
      s.add_symmetric(n_m + n_u + static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  return s.matrix();
}

Vector SaddleSystem::rhs() const {
  Vector r(size());
  r << -g_load, f_load, n_values;
  return r;
}

namespace {

struct ElementMatrices {
  Mat20 a;
  Eigen::Matrix<double, 3, kLocalDofs> b;
};

ElementMatrices element_matrices(const ElementMap& map, const LocalBasis& basis, const MaterialLaw& material) {
  const auto& phi = reference_basis();
  const QuadRule& rule = cached_gauss_rule(4, 2);
  const Eigen::Matrix3d& q = material.compliance();
  Mat20 ahat = Mat20::Zero();
  Eigen::Matrix<double, 3, kLocalDofs> bhat = Eigen::Matrix<double, 3, kLocalDofs>::Zero();
  std::array<Poly2, kLocalDofs> dd;
  for (int i = 0; i < kLocalDofs; ++i) dd[static_cast<std::size_t>(i)] = ref_divdiv(phi[static_cast<std::size_t>(i)]);
  const double aj = std::abs(map.J);
  for (std::size_t g = 0; g < rule.size(); ++g) {
    const double x = rule.points[g][0], y = rule.points[g][1], w = rule.weights[g];
    Eigen::Matrix<double, 3, kLocalDofs> v;
    for (int i = 0; i < kLocalDofs; ++i) {
      const Eigen::Matrix2d m = map.B * phi[static_cast<std::size_t>(i)](x, y) * map.B.transpose();
      v.col(i) = Eigen::Vector3d(m(0, 0), m(0, 1), m(1, 1));
      const double d = dd[static_cast<std::size_t>(i)](x, y);
      bhat(0, i) += w * d;
      bhat(1, i) += w * d * x;
      bhat(2, i) += w * d * y;
    }
    ahat.noalias() += (w / aj) * v.transpose() * q * v;
  }
  ElementMatrices em;
  em.a = basis.Tinv.transpose() * ahat * basis.Tinv;
  em.a = 0.5 * (em.a + em.a.transpose()).eval();
  em.b = bhat * basis.Tinv;
  return em;
}

}  // namespace

SaddleSystem assemble(const Mesh& mesh, const DofMap& dofs, const MaterialLaw& material,
                      LocalBasisCache& cache) {
  SaddleSystem sys;
  sys.n_m = dofs.num_free();
  sys.n_u = 3 * mesh.num_cells();
  SparseSystemCore a(sys.n_m);
  SparseSystemCore full(sys.n_m + sys.n_u);
  std::map<std::array<double, 4>, ElementMatrices> local;
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const ElementMap map = element_map(mesh, k);
    const std::array<double, 4> key = {map.B(0, 0), map.B(0, 1), map.B(1, 0), map.B(1, 1)};
    auto it = local.find(key);
    if (it == local.end()) it = local.emplace(key, element_matrices(map, *cache.get(map), material)).first;
    dofs.scatter_matrix(k, it->second.a, a);
    dofs.scatter_rows(k, it->second.b, sys.n_m, full);
  }
  sys.A = a.matrix();
  // Only the off-diagonal B block was put into `full`.
  const SparseMatrix f = full.matrix();
  sys.B = f.block(sys.n_m, 0, sys.n_u, sys.n_m);
  sys.L = SparseMatrix(0, sys.n_m);
  sys.g_load = Vector::Zero(sys.n_m);
  sys.f_load = Vector::Zero(sys.n_u);
  sys.n_values = Vector::Zero(0);
  return sys;
}

Vector load_f(const Mesh& mesh, const ScalarFunction& f, int order) {
  const QuadRule& rule = cached_gauss_rule(order, 2);
  Vector out = Vector::Zero(3 * mesh.num_cells());
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const ElementMap map = element_map(mesh, k);
    Eigen::Vector3d r = Eigen::Vector3d::Zero();
    for (std::size_t g = 0; g < rule.size(); ++g) {
      const Eigen::Vector2d xh(rule.points[g][0], rule.points[g][1]);
      r += rule.weights[g] * f(map(xh)) * Eigen::Vector3d(1.0, xh.x(), xh.y());
    }
    out.segment<3>(3 * k) = std::abs(map.J) * r;
  }
  return out;
}

Vector dirichlet_load(const Mesh& mesh, const DofMap& dofs, const DirichletData& data, int order) {
  const QuadRule& rule = cached_gauss_rule(order, 1);
  Vector out = Vector::Zero(dofs.num_free());
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const auto& c = mesh.cell(k);
    Dof20 local = Dof20::Zero();
    bool any = false;
    for (int j = 0; j < 4; ++j) {
      if (mesh.edge(mesh.cell_edge(k, j)).kind != EdgeKind::Dirichlet) continue;
      any = true;
      const Eigen::Vector2d p0 = mesh.vertex(c[static_cast<std::size_t>(j)]);
      const Eigen::Vector2d p1 = mesh.vertex(c[static_cast<std::size_t>((j + 1) % 4)]);
      const double len = (p1 - p0).norm();
      const Eigen::Vector2d t = (p1 - p0) / len;
      const Eigen::Vector2d n(t.y(), -t.x());
      double g0 = 0, g1 = 0, dn0 = 0, dn1 = 0;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const double s = rule.points[q][0];
        const double w = 0.5 * len * rule.weights[q];
        const Eigen::Vector2d x = 0.5 * (p0 + p1) + 0.5 * s * (p1 - p0);
        const double gv = data.g(x);
        const double dn = n.dot(data.grad_g(x));
        g0 += w * gv;
        g1 += w * s * gv;
        dn0 += w * dn;
        dn1 += w * s * dn;
      }
      local(dof_index(DofKind::ShearMoment0, j)) += g0 / len;
      local(dof_index(DofKind::ShearMoment1, j)) += 3.0 * g1 / len;
      local(dof_index(DofKind::NormalMoment0, j)) -= dn0 / len;
      local(dof_index(DofKind::NormalMoment1, j)) -= 3.0 * dn1 / len;
    }
    for (int j = 0; j < 4; ++j) {
      const int v = c[static_cast<std::size_t>(j)];
      if (mesh.vertex_kind(v) != VertexKind::DirichletTouching) continue;
      any = true;
      local(dof_index(DofKind::Jump, j)) -= data.g(mesh.vertex(v));
    }
    if (any) dofs.scatter(k, local, out);
  }
  return out;
}

std::vector<ConstraintRow> neumann_constraints(const Mesh& mesh, const DofMap& dofs, const TensorField& data,
                                               int edge_order) {
  if (mesh.count_edges(EdgeKind::Neumann) == 0) throw PartitionError("mesh has no Neumann edges");
  std::vector<ConstraintRow> rows;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const MeshEdge& me = mesh.edge(e);
    if (me.kind != EdgeKind::Neumann) continue;
    if (me.cells[1] >= 0) throw PartitionError("Neumann edge " + std::to_string(e) + " is not on the boundary");
    const int k = me.cells[0];
    const Dof20 local = local_dofs(element_map(mesh, k), data.jet, edge_order);
    int j = 0;
    while (mesh.cell_edge(k, j) != e) ++j;
    for (DofKind kind : {DofKind::NormalMoment0, DofKind::NormalMoment1, DofKind::ShearMoment0, DofKind::ShearMoment1}) {
      const int m = dof_index(kind, j);
      const auto ent = dofs.local_entries(k, m);
      rows.push_back({{{ent[0].global, 1.0}}, ent[0].coeff * local(m)});
    }
  }
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (mesh.vertex_kind(v) != VertexKind::NeumannInterior) continue;
    ConstraintRow row;
    for (const auto& [k, corner] : mesh.patch(v)) {
      const Dof20 local = local_dofs(element_map(mesh, k), data.jet, 2);
      const int g = dofs.jump_dof(k, corner);
      row.entries.push_back({g, 1.0});
      row.value += local(dof_index(DofKind::Jump, corner));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void set_constraints(SaddleSystem& sys, const std::vector<ConstraintRow>& rows) {
  sys.n_c = static_cast<int>(rows.size());
  std::vector<Triplet> t;
  sys.n_values = Vector::Zero(sys.n_c);
  for (int r = 0; r < sys.n_c; ++r) {
    for (const auto& [g, c] : rows[static_cast<std::size_t>(r)].entries) t.emplace_back(r, g, c);
    sys.n_values(r) = rows[static_cast<std::size_t>(r)].value;
  }
  sys.L = SparseMatrix(sys.n_c, sys.n_m);
  sys.L.setFromTriplets(t.begin(), t.end());
}

SolveResult solve_problem(const SaddleSystem& sys, const SolveOptions& opts) {
  SolveResult res;
  const Vector z = solve_saddle(sys.matrix(), sys.rhs(), opts, &res.info);
  res.state.m = z.head(sys.n_m);
  res.state.u = -z.segment(sys.n_m, sys.n_u);
  res.multipliers = z.tail(sys.n_c);
  return res;
}

Vector p1_mass_diagonal(const Mesh& mesh) {
  Vector d(3 * mesh.num_cells());
  for (int k = 0; k < mesh.num_cells(); ++k)
    d.segment<3>(3 * k) = std::abs(element_map(mesh, k).J) * p1_reference_mass();
  return d;
}

double infsup_constant(const Mesh& mesh, const SaddleSystem& sys) {
  const DenseMatrix a(sys.A);
  const DenseMatrix b(sys.B);
  const Vector mass = p1_mass_diagonal(mesh);
  const DenseMatrix x = a + b.transpose() * mass.cwiseInverse().asDiagonal() * b;
  const Eigen::LLT<DenseMatrix> llt(x);
  if (llt.info() != Eigen::Success) throw SingularMatrixError("infsup_constant: norm matrix is not SPD", -1, 0.0);
  const DenseMatrix s = b * llt.solve(b.transpose());
  const DenseMatrix ms = mass.asDiagonal();
  Eigen::GeneralizedSelfAdjointEigenSolver<DenseMatrix> eig(0.5 * (s + s.transpose()), ms,
                                                            Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues().minCoeff();
  return lmin > 0.0 ? std::sqrt(lmin) : 0.0;
}

}  // namespace ddiv
