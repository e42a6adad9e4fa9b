#include "ddiv/piola.hpp"

#include <cmath>
#include <string>

#include "ddiv/error.hpp"
#include "ddiv/quadrature.hpp"

namespace ddiv {

ElementMap element_map(const std::array<Eigen::Vector2d, 4>& corners) {
  ElementMap m;
  m.B.col(0) = 0.5 * (corners[1] - corners[0]);
  m.B.col(1) = 0.5 * (corners[3] - corners[0]);
  m.a = 0.5 * (corners[1] + corners[3]);
  m.J = m.B.determinant();
  const double scale = m.B.squaredNorm();
  if (!(std::abs(m.J) > 1e-14 * scale)) throw GeometryError("element map is singular");
  return m;
}

ElementMap element_map(const Mesh& m, int cell) {
  const auto& c = m.cell(cell);
  return element_map({m.vertex(c[0]), m.vertex(c[1]), m.vertex(c[2]), m.vertex(c[3])});
}

namespace {

Eigen::Matrix2d sym(double xx, double xy, double yy) {
  Eigen::Matrix2d m;
  m << xx, xy, xy, yy;
  return m;
}

}  // namespace

Eigen::Matrix2d push_tensor(const ElementMap& map, const SymTensorPoly& mhat, const Eigen::Vector2d& xhat) {
  return map.B * mhat(xhat.x(), xhat.y()) * map.B.transpose() / std::abs(map.J);
}

TensorJet push_jet(const ElementMap& map, const SymTensorPoly& mhat, const Eigen::Vector2d& xhat) {
  const double x = xhat.x(), y = xhat.y();
  const double aj = std::abs(map.J);
  TensorJet jet;
  jet.value = map.B * mhat(x, y) * map.B.transpose() / aj;
  const auto d = mhat.div();
  jet.div = map.B * Eigen::Vector2d(d[0](x, y), d[1](x, y)) / aj;
  jet.divdiv = ref_divdiv(mhat)(x, y) / aj;
  const std::array<Eigen::Matrix2d, 2> ghat = {
      map.B * sym(mhat.xx.dx()(x, y), mhat.xy.dx()(x, y), mhat.yy.dx()(x, y)) * map.B.transpose() / aj,
      map.B * sym(mhat.xx.dy()(x, y), mhat.xy.dy()(x, y), mhat.yy.dy()(x, y)) * map.B.transpose() / aj};
  const Eigen::Matrix2d binv = map.B.inverse();
  for (int k = 0; k < 2; ++k)
    jet.grad[static_cast<std::size_t>(k)] = binv(0, k) * ghat[0] + binv(1, k) * ghat[1];
  return jet;
}

namespace {

template <class Eval>
Dof20 local_dofs_impl(const ElementMap& map, const Eval& eval, int edge_order) {
  const QuadRule& rule = cached_gauss_rule(edge_order, 1);
  std::array<Eigen::Vector2d, 4> corners;
  for (int j = 0; j < 4; ++j) corners[static_cast<std::size_t>(j)] = map(reference_corner(j));
  // t.Mn at the start and end of every edge, from the inside of the cell.
  std::array<double, 4> tn_start{}, tn_end{};
  Dof20 d = Dof20::Zero();
  for (int j = 0; j < 4; ++j) {
    const Eigen::Vector2d& p0 = corners[static_cast<std::size_t>(j)];
    const Eigen::Vector2d& p1 = corners[static_cast<std::size_t>((j + 1) % 4)];
    const double len = (p1 - p0).norm();
    const Eigen::Vector2d t = (p1 - p0) / len;
    const Eigen::Vector2d n(t.y(), -t.x());
    const Eigen::Vector2d mid = 0.5 * (p0 + p1);
    const Eigen::Vector2d half = 0.5 * (p1 - p0);
    double m0 = 0, m1 = 0, q0 = 0, q1 = 0, tn_int = 0;
    for (std::size_t g = 0; g < rule.size(); ++g) {
      const double s = rule.points[g][0];
      const double w = rule.weights[g];
      const TensorJet jet = eval(mid + s * half);
      const double nn = n.dot(jet.value * n);
      const double ndiv = n.dot(jet.div);
      m0 += w * nn;
      m1 += w * s * nn;
      q0 += w * ndiv;
      q1 += w * s * ndiv;
      tn_int += w * t.dot(jet.value * n);
    }
    const double scale = 0.5 * len;
    const double a = t.dot(eval(p0).value * n);
    const double b = t.dot(eval(p1).value * n);
    tn_start[static_cast<std::size_t>(j)] = a;
    tn_end[static_cast<std::size_t>(j)] = b;
    d(dof_index(DofKind::NormalMoment0, j)) = scale * m0;
    d(dof_index(DofKind::NormalMoment1, j)) = scale * m1;
    d(dof_index(DofKind::ShearMoment0, j)) = scale * q0 + b - a;
    d(dof_index(DofKind::ShearMoment1, j)) = scale * q1 + b + a - tn_int;
  }
  for (int j = 0; j < 4; ++j)
    d(dof_index(DofKind::Jump, j)) =
        tn_end[static_cast<std::size_t>((j + 3) % 4)] - tn_start[static_cast<std::size_t>(j)];
  return d;
}

}  // namespace

Dof20 local_dofs(const ElementMap& map, const TensorEvaluator& field, int edge_order) {
  return local_dofs_impl(map, field, edge_order);
}

Dof20 local_dofs(const ElementMap& map, const SymTensorPoly& mhat, int edge_order) {
  const Eigen::Matrix2d binv = map.B.inverse();
  const auto d = mhat.div();
  const double aj = std::abs(map.J);
  auto eval = [&](const Eigen::Vector2d& x) {
    const Eigen::Vector2d xh = binv * (x - map.a);
    TensorJet jet;
    jet.value = map.B * mhat(xh.x(), xh.y()) * map.B.transpose() / aj;
    jet.div = map.B * Eigen::Vector2d(d[0](xh.x(), xh.y()), d[1](xh.x(), xh.y())) / aj;
    return jet;
  };
  return local_dofs_impl(map, eval, edge_order);
}

PhysicalDofFrame dof_frame(const Mesh& m, int cell) {
  PhysicalDofFrame f;
  for (int j = 0; j < 4; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    const int e = m.cell_edge(cell, j);
    f.edges[ju] = e;
    f.sigma[ju] = m.cell_edge_sign(cell, j);
    const MeshEdge& me = m.edge(e);
    const Eigen::Vector2d t = (m.vertex(me.v[1]) - m.vertex(me.v[0])).normalized();
    f.global_normal[ju] = Eigen::Vector2d(t.y(), -t.x());
    const double s = f.sigma[ju];
    // Normal-normal moments are invariant under n -> -n; the first moment
    // follows the edge polynomial.  The shear flips with the normal, and its
    // first moment picks up both factors.
    f.local_to_global(dof_index(DofKind::NormalMoment0, j)) = 1.0;
    f.local_to_global(dof_index(DofKind::NormalMoment1, j)) = s;
    f.local_to_global(dof_index(DofKind::ShearMoment0, j)) = s;
    f.local_to_global(dof_index(DofKind::ShearMoment1, j)) = 1.0;
    f.local_to_global(dof_index(DofKind::Jump, j)) = 1.0;
  }
  return f;
}

Dof20 physical_dofs(const ElementMap& map, const PhysicalDofFrame& frame, const SymTensorPoly& mhat) {
  return local_dofs(map, mhat).cwiseProduct(frame.local_to_global);
}

LocalBasis local_basis_matrix(const ElementMap& map) {
  LocalBasis lb;
  const auto& phi = reference_basis();
  for (int i = 0; i < kLocalDofs; ++i) lb.T.col(i) = local_dofs(map, phi[static_cast<std::size_t>(i)]);
  Eigen::JacobiSVD<Mat20> svd(lb.T);
  const auto& sv = svd.singularValues();
  lb.condition = sv(kLocalDofs - 1) > 0.0 ? sv(0) / sv(kLocalDofs - 1) : INFINITY;
  if (!(lb.condition <= kMaxBasisCondition))
    throw GeometryError("local basis matrix is ill-conditioned (condition " + std::to_string(lb.condition) + ")");
  lb.Tinv = lb.T.fullPivLu().inverse();
  return lb;
}

std::shared_ptr<const LocalBasis> LocalBasisCache::get(const ElementMap& map) {
  const std::array<double, 4> key = {map.B(0, 0), map.B(0, 1), map.B(1, 0), map.B(1, 1)};
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  auto basis = std::make_shared<const LocalBasis>(local_basis_matrix(map));
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.try_emplace(key, std::move(basis)).first->second;
}

std::size_t LocalBasisCache::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.size();
}

SymTensorPoly reference_tensor(const LocalBasis& basis, const Dof20& local) {
  const Dof20 c = basis.Tinv * local;
  const auto& phi = reference_basis();
  SymTensorPoly m;
  for (int i = 0; i < kLocalDofs; ++i) {
    if (c(i) == 0.0) continue;
    m += c(i) * phi[static_cast<std::size_t>(i)];
  }
  return m;
}

}  // namespace ddiv
