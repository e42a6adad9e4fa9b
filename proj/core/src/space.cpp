#include "ddiv/space.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "ddiv/error.hpp"
#include "ddiv/quadrature.hpp"

namespace ddiv {

DofMap::DofMap(const Mesh& m) : num_edges_(m.num_edges()) {
  const int nk = m.num_cells();
  cell_edges_.resize(static_cast<std::size_t>(nk));
  jumps_.assign(static_cast<std::size_t>(nk), {-2, -2, -2, -2});
  local_.resize(static_cast<std::size_t>(nk));

  std::vector<bool> eliminated_slot(static_cast<std::size_t>(4 * nk), false);
  for (int v : m.interior_vertices()) {
    const auto& p = m.patch(v);
    eliminated_slot[static_cast<std::size_t>(4 * p.front().cell + p.front().corner)] = true;
  }
  int next = 4 * num_edges_;
  for (int k = 0; k < nk; ++k)
    for (int j = 0; j < 4; ++j) {
      if (eliminated_slot[static_cast<std::size_t>(4 * k + j)]) {
        jumps_[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] = -1;
        ++num_eliminated_;
      } else {
        jumps_[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] = next++;
      }
    }
  num_free_ = next;

  for (int k = 0; k < nk; ++k) {
    auto& lm = local_[static_cast<std::size_t>(k)];
    for (int j = 0; j < 4; ++j) {
      const int e = m.cell_edge(k, j);
      cell_edges_[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] = e;
      const double s = m.cell_edge_sign(k, j);
      lm.direct[static_cast<std::size_t>(dof_index(DofKind::NormalMoment0, j))] = {edge_dof(e, 0), 1.0};
      lm.direct[static_cast<std::size_t>(dof_index(DofKind::NormalMoment1, j))] = {edge_dof(e, 1), s};
      lm.direct[static_cast<std::size_t>(dof_index(DofKind::ShearMoment0, j))] = {edge_dof(e, 2), s};
      lm.direct[static_cast<std::size_t>(dof_index(DofKind::ShearMoment1, j))] = {edge_dof(e, 3), 1.0};
      const int g = jump_dof(k, j);
      lm.direct[static_cast<std::size_t>(dof_index(DofKind::Jump, j))] = {g, g >= 0 ? 1.0 : 0.0};
      if (g < 0) {
        const int v = m.cell(k)[static_cast<std::size_t>(j)];
        for (const auto& [cell, corner] : m.patch(v))
          if (cell != k) lm.eliminated_from[static_cast<std::size_t>(j)].push_back(jump_dof(cell, corner));
      }
    }
  }
}

int DofMap::jump_dof(int cell, int corner) const {
  if (cell < 0 || cell >= num_cells() || corner < 0 || corner > 3)
    throw ParameterError("jump_dof: index out of range");
  return jumps_[static_cast<std::size_t>(cell)][static_cast<std::size_t>(corner)];
}

std::vector<DofMap::Entry> DofMap::local_entries(int cell, int m) const {
  if (cell < 0 || cell >= num_cells() || m < 0 || m >= kLocalDofs)
    throw ParameterError("local_entries: index out of range");
  const auto& lm = local_[static_cast<std::size_t>(cell)];
  const Entry& d = lm.direct[static_cast<std::size_t>(m)];
  if (d.global >= 0) return {d};
  std::vector<Entry> out;
  for (int g : lm.eliminated_from[static_cast<std::size_t>(m - dof_index(DofKind::Jump, 0))]) out.push_back({g, -1.0});
  return out;
}

Dof20 DofMap::gather(int cell, const Vector& x) const {
  if (x.size() != num_free_) throw ParameterError("gather: vector size does not match the dof count");
  Dof20 l;
  for (int m = 0; m < kLocalDofs; ++m) {
    double v = 0.0;
    for (const auto& [g, c] : local_entries(cell, m)) v += c * x(g);
    l(m) = v;
  }
  return l;
}

void DofMap::scatter(int cell, const Dof20& local, Vector& y) const {
  if (y.size() != num_free_) throw ParameterError("scatter: vector size does not match the dof count");
  for (int m = 0; m < kLocalDofs; ++m)
    for (const auto& [g, c] : local_entries(cell, m)) y(g) += c * local(m);
}

void DofMap::scatter_matrix(int cell, const Mat20& a, SparseSystemCore& s) const {
  std::array<std::vector<Entry>, kLocalDofs> ent;
  for (int m = 0; m < kLocalDofs; ++m) ent[static_cast<std::size_t>(m)] = local_entries(cell, m);
  for (int p = 0; p < kLocalDofs; ++p)
    for (int q = p; q < kLocalDofs; ++q) {
      const double v = a(p, q);
      if (v == 0.0) continue;
      for (const auto& ep : ent[static_cast<std::size_t>(p)])
        for (const auto& eq : ent[static_cast<std::size_t>(q)]) {
          const double c = ep.coeff * eq.coeff * v;
          if (p == q) {
            s.add_symmetric(ep.global, eq.global, ep.global == eq.global ? c : 0.5 * c);
          } else {
            s.add_symmetric(ep.global, eq.global, ep.global == eq.global ? 2.0 * c : c);
          }
        }
    }
}

void DofMap::scatter_rows(int cell, const Eigen::Matrix<double, 3, kLocalDofs>& b, int row0,
                          SparseSystemCore& s) const {
  for (int m = 0; m < kLocalDofs; ++m) {
    const auto ent = local_entries(cell, m);
    for (int r = 0; r < 3; ++r) {
      const double v = b(r, m);
      if (v == 0.0) continue;
      for (const auto& [g, c] : ent) s.add_symmetric(row0 + 3 * cell + r, g, c * v);
    }
  }
}

void DofMap::dump(std::ostream& os) const {
  os << "free " << num_free_ << " edges " << num_edges_ << " cells " << num_cells() << " eliminated "
     << num_eliminated_ << '\n';
  for (int e = 0; e < num_edges_; ++e)
    os << "edge " << e << ": " << edge_dof(e, 0) << ' ' << edge_dof(e, 1) << ' ' << edge_dof(e, 2) << ' '
       << edge_dof(e, 3) << '\n';
  for (int k = 0; k < num_cells(); ++k) {
    os << "cell " << k << ':';
    for (int j = 0; j < 4; ++j) {
      const int g = jump_dof(k, j);
      if (g < 0)
        os << " x";
      else
        os << ' ' << g;
    }
    os << '\n';
  }
}

DiscreteField::DiscreteField(const Mesh& mesh, std::vector<SymTensorPoly> mhat)
    : mesh_(&mesh), mhat_(std::move(mhat)) {
  if (static_cast<int>(mhat_.size()) != mesh.num_cells())
    throw ParameterError("DiscreteField: one reference tensor per cell required");
  maps_.reserve(mhat_.size());
  for (int k = 0; k < mesh.num_cells(); ++k) maps_.push_back(element_map(mesh, k));
}

DiscreteField DiscreteField::from_global(const Mesh& mesh, const DofMap& dofs, LocalBasisCache& cache,
                                         const Vector& m) {
  std::vector<SymTensorPoly> mhat;
  mhat.reserve(static_cast<std::size_t>(mesh.num_cells()));
  for (int k = 0; k < mesh.num_cells(); ++k)
    mhat.push_back(reference_tensor(*cache.get(element_map(mesh, k)), dofs.gather(k, m)));
  return DiscreteField(mesh, std::move(mhat));
}

TensorJet DiscreteField::eval_ref(int cell, const Eigen::Vector2d& xhat) const {
  return push_jet(map(cell), reference(cell), xhat);
}

TensorJet DiscreteField::eval(int cell, const Eigen::Vector2d& x) const {
  return eval_ref(cell, map(cell).inverse(x));
}

double ConformityReport::max_violation() const {
  return std::max({max_normal_moment, max_shear_moment, max_jump_sum});
}

namespace {

// t.Mn at corner c of the cell, seen from local edge j (c is an endpoint of j).
double tangential_normal(const DiscreteField& f, int cell, int j, const Eigen::Vector2d& at) {
  const auto& mesh = f.mesh();
  const auto& c = mesh.cell(cell);
  const Eigen::Vector2d p0 = mesh.vertex(c[static_cast<std::size_t>(j)]);
  const Eigen::Vector2d p1 = mesh.vertex(c[static_cast<std::size_t>((j + 1) % 4)]);
  const Eigen::Vector2d t = (p1 - p0).normalized();
  const Eigen::Vector2d n(t.y(), -t.x());
  return t.dot(f.eval(cell, at).value * n);
}

}  // namespace

ConformityReport check_conformity(const DiscreteField& field, int edge_order) {
  const Mesh& mesh = field.mesh();
  const QuadRule& rule = cached_gauss_rule(edge_order, 1);
  ConformityReport r;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const MeshEdge& me = mesh.edge(e);
    if (me.cells[1] < 0) continue;
    const Eigen::Vector2d a = mesh.vertex(me.v[0]);
    const Eigen::Vector2d b = mesh.vertex(me.v[1]);
    const double half_len = 0.5 * (b - a).norm();
    const Eigen::Vector2d t = (b - a).normalized();
    const Eigen::Vector2d n(t.y(), -t.x());
    std::array<double, 2> nn0{}, nn1{}, q0{}, q1{};
    for (int side = 0; side < 2; ++side) {
      const int k = me.cells[static_cast<std::size_t>(side)];
      // Outward orientation of this cell on the edge.
      int j = 0;
      while (mesh.cell_edge(k, j) != e) ++j;
      const double sg = mesh.cell_edge_sign(k, j);
      const Eigen::Vector2d no = sg * n;
      const Eigen::Vector2d to = sg * t;
      for (std::size_t g = 0; g < rule.size(); ++g) {
        const double s = rule.points[g][0];
        const double w = rule.weights[g] * half_len;
        const Eigen::Vector2d x = 0.5 * (a + b) + s * 0.5 * (b - a);
        const TensorJet jet = field.eval(k, x);
        const double nn = no.dot(jet.value * no);
        const Eigen::Matrix2d dt = to.x() * jet.grad[0] + to.y() * jet.grad[1];
        const double q = no.dot(jet.div) + to.dot(dt * no);
        nn0[static_cast<std::size_t>(side)] += w * nn;
        nn1[static_cast<std::size_t>(side)] += w * s * nn;
        q0[static_cast<std::size_t>(side)] += w * q;
        q1[static_cast<std::size_t>(side)] += w * s * q;
      }
    }
    r.max_normal_moment = std::max({r.max_normal_moment, std::abs(nn0[0] - nn0[1]), std::abs(nn1[0] - nn1[1])});
    r.max_shear_moment = std::max({r.max_shear_moment, std::abs(q0[0] + q0[1]), std::abs(q1[0] + q1[1])});
  }
  for (int v : mesh.interior_vertices()) {
    double sum = 0.0;
    const Eigen::Vector2d x = mesh.vertex(v);
    for (const auto& [k, c] : mesh.patch(v))
      sum += tangential_normal(field, k, (c + 3) % 4, x) - tangential_normal(field, k, c, x);
    r.max_jump_sum = std::max(r.max_jump_sum, std::abs(sum));
  }
  return r;
}

ConformityReport check_conformity(const Mesh& mesh, const DofMap& dofs, LocalBasisCache& cache,
                                  const FieldState& state) {
  return check_conformity(DiscreteField::from_global(mesh, dofs, cache, state.m));
}

}  // namespace ddiv
