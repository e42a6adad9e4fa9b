#include "ddiv/refelement.hpp"

#include <cmath>
#include <string>

#include "ddiv/error.hpp"

namespace ddiv {

Eigen::Matrix2d SymTensorPoly::operator()(double x, double y) const {
  Eigen::Matrix2d m;
  const double b = xy(x, y);
  m << xx(x, y), b, b, yy(x, y);
  return m;
}

std::array<Poly2, 2> SymTensorPoly::div() const {
  return {xx.dx() + xy.dy(), xy.dx() + yy.dy()};
}

SymTensorPoly& SymTensorPoly::operator+=(const SymTensorPoly& o) {
  xx += o.xx;
  xy += o.xy;
  yy += o.yy;
  return *this;
}

SymTensorPoly& SymTensorPoly::operator*=(double s) {
  xx *= s;
  xy *= s;
  yy *= s;
  return *this;
}

Poly2 ref_divdiv(const SymTensorPoly& m) {
  return m.xx.dx().dx() + 2.0 * m.xy.dx().dy() + m.yy.dy().dy();
}

bool in_x0_space(const SymTensorPoly& m) {
  auto check = [](const Poly2& p, auto allowed) {
    for (int i = 0; i <= p.bound_x(); ++i)
      for (int j = 0; j <= p.bound_y(); ++j)
        if (p.coeff(i, j) != 0.0 && !allowed(i, j)) return false;
    return true;
  };
  const bool a = check(m.xx, [](int i, int j) { return (i <= 1 && j <= 1) || (j == 0 && i <= 3); });
  const bool b = check(m.xy, [](int i, int j) { return i + j <= 2 || (i == 2 && j == 1) || (i == 1 && j == 2); });
  const bool c = check(m.yy, [](int i, int j) { return (i <= 1 && j <= 1) || (i == 0 && j <= 3); });
  return a && b && c;
}

const std::array<RefEdge, 4>& reference_edges() {
  static const std::array<RefEdge, 4> edges = [] {
    std::array<RefEdge, 4> e;
    for (int j = 0; j < 4; ++j) {
      auto& r = e[static_cast<std::size_t>(j)];
      r.start = reference_corner(j);
      r.end = reference_corner((j + 1) % 4);
      r.midpoint = 0.5 * (r.start + r.end);
      r.tangent = 0.5 * (r.end - r.start);
      r.normal = Eigen::Vector2d(r.tangent.y(), -r.tangent.x());
    }
    return e;
  }();
  return edges;
}

Eigen::Vector2d reference_corner(int corner) {
  static const std::array<Eigen::Vector2d, 4> c = {
      Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, -1), Eigen::Vector2d(1, 1), Eigen::Vector2d(-1, 1)};
  if (corner < 0 || corner > 3) throw ParameterError("reference_corner: index " + std::to_string(corner));
  return c[static_cast<std::size_t>(corner)];
}

namespace {

const RefEdge& edge_at(int edge) {
  if (edge < 0 || edge > 3) throw ParameterError("reference edge index " + std::to_string(edge));
  return reference_edges()[static_cast<std::size_t>(edge)];
}

// a . M b as a polynomial.
Poly2 contract(const SymTensorPoly& m, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.x() * m.xx + (a.x() * b.y() + a.y() * b.x()) * m.xy + a.y() * b.y() * m.yy;
}

Poly1 restrict_to_edge(const Poly2& p, const RefEdge& e) {
  return p.restrict_to_line(e.midpoint.x(), e.tangent.x(), e.midpoint.y(), e.tangent.y());
}

}  // namespace

Poly1 ref_trace_nn(const SymTensorPoly& m, int edge) {
  const RefEdge& e = edge_at(edge);
  return restrict_to_edge(contract(m, e.normal, e.normal), e);
}

Poly1 ref_trace_tn(const SymTensorPoly& m, int edge) {
  const RefEdge& e = edge_at(edge);
  return restrict_to_edge(contract(m, e.tangent, e.normal), e);
}

Poly1 ref_trace_shear(const SymTensorPoly& m, int edge) {
  const RefEdge& e = edge_at(edge);
  const auto d = m.div();
  const Poly2 tn = contract(m, e.tangent, e.normal);
  const Poly2 q = e.normal.x() * d[0] + e.normal.y() * d[1] + e.tangent.x() * tn.dx() +
                  e.tangent.y() * tn.dy();
  return restrict_to_edge(q, e);
}

double ref_corner_jump(const SymTensorPoly& m, int corner) {
  if (corner < 0 || corner > 3) throw ParameterError("corner index " + std::to_string(corner));
  const int incoming = (corner + 3) % 4;
  return ref_trace_tn(m, incoming)(1.0) - ref_trace_tn(m, corner)(-1.0);
}

Dof20 reference_dofs(const SymTensorPoly& m) {
  Dof20 d;
  for (int j = 0; j < 4; ++j) {
    const Poly1 nn = ref_trace_nn(m, j);
    const Poly1 q = ref_trace_shear(m, j);
    d(dof_index(DofKind::NormalMoment0, j)) = nn.moment(0);
    d(dof_index(DofKind::NormalMoment1, j)) = nn.moment(1);
    d(dof_index(DofKind::ShearMoment0, j)) = q.moment(0);
    d(dof_index(DofKind::ShearMoment1, j)) = q.moment(1);
    d(dof_index(DofKind::Jump, j)) = ref_corner_jump(m, j);
  }
  return d;
}

double dof_normalization(int dof) {
  if (dof < 0 || dof >= kLocalDofs) throw ParameterError("dof index " + std::to_string(dof));
  switch (dof / 4) {
    case 0:
    case 2:
      return 2.0;
    case 1:
    case 3:
      return 2.0 / 3.0;
    default:
      return 1.0;
  }
}

std::array<SymTensorPoly, kLocalDofs> build_reference_basis() {
  const Poly2 one = Poly2::constant(1.0);
  const Poly2 x = Poly2::monomial(1, 0);
  const Poly2 y = Poly2::monomial(0, 1);
  auto mul = [](const Poly2& a, const Poly2& b) { return multiply(a, b, 3, 3); };
  const Poly2 x2 = mul(x, x);
  const Poly2 y2 = mul(y, y);
  const Poly2 x3 = mul(x2, x);
  const Poly2 y3 = mul(y2, y);

  std::array<SymTensorPoly, kLocalDofs> phi;
  auto& p = phi;
  // Unit normal-normal moments.
  p[0].yy = (4.0 * one - 6.0 * y + 2.0 * y3) * 0.125;
  p[1].xx = (4.0 * one + 6.0 * x - 2.0 * x3) * 0.125;
  p[2].yy = (4.0 * one + 6.0 * y - 2.0 * y3) * 0.125;
  p[3].xx = (4.0 * one - 6.0 * x + 2.0 * x3) * 0.125;
  // First normal-normal moments.
  p[4].xy = (x2 - one) * 0.125;
  p[4].yy = 4.0 * mul(x, one - y) * 0.125;
  p[5].xx = 4.0 * mul(one + x, y) * 0.125;
  p[5].xy = (one - y2) * 0.125;
  p[6].xy = (x2 - one) * 0.125;
  p[6].yy = -4.0 * mul(x, one + y) * 0.125;
  p[7].xx = -4.0 * mul(one - x, y) * 0.125;
  p[7].xy = (one - y2) * 0.125;
  // Unit effective-shear moments.
  p[8].yy = mul(one - y, y2 - one) * 0.25;
  p[9].xx = mul(one + x, x2 - one) * 0.25;
  p[10].yy = mul(one + y, y2 - one) * 0.25;
  p[11].xx = mul(one - x, x2 - one) * 0.25;
  // First effective-shear moments.
  p[12].xy = mul(one - y, one - x2) * 0.125;
  p[13].xy = mul(one + x, y2 - one) * 0.125;
  p[14].xy = mul(one + y, one - x2) * 0.125;
  p[15].xy = mul(one - x, y2 - one) * 0.125;
  // Corner jumps.
  p[16].xx = mul(one - x, one - x2) * 0.125;
  p[16].xy = mul(one - x, one - y) * 0.125;
  p[16].yy = mul(one - y, one - y2) * 0.125;
  p[17].xx = mul(one + x, one - x2) * 0.125;
  p[17].xy = mul(one + x, y - one) * 0.125;
  p[17].yy = mul(one - y, one - y2) * 0.125;
  p[18].xx = mul(one + x, one - x2) * 0.125;
  p[18].xy = mul(one + x, one + y) * 0.125;
  p[18].yy = mul(one + y, one - y2) * 0.125;
  p[19].xx = mul(one - x, one - x2) * 0.125;
  p[19].xy = mul(x - one, one + y) * 0.125;
  p[19].yy = mul(one + y, one - y2) * 0.125;
  return phi;
}

const std::array<SymTensorPoly, kLocalDofs>& reference_basis() {
  static const auto basis = build_reference_basis();
  return basis;
}

UnisolvencyReport verify_unisolvency(std::span<const SymTensorPoly, kLocalDofs> basis, double tol) {
  UnisolvencyReport r;
  for (int i = 0; i < kLocalDofs; ++i) r.raw.col(i) = reference_dofs(basis[static_cast<std::size_t>(i)]);
  for (int m = 0; m < kLocalDofs; ++m) r.normalized.row(m) = r.raw.row(m) / dof_normalization(m);
  r.max_deviation = 0.0;
  for (int m = 0; m < kLocalDofs; ++m) {
    for (int i = 0; i < kLocalDofs; ++i) {
      const double dev = std::abs(r.normalized(m, i) - (m == i ? 1.0 : 0.0));
      r.max_deviation = std::max(r.max_deviation, dev);
      if (dev > tol) r.offending.emplace_back(m, i);
    }
  }
  r.passed = r.offending.empty();
  return r;
}

std::vector<FieldSample> sample_reference_field(const SymTensorPoly& m, int grid) {
  if (grid < 2) throw ParameterError("sample grid must be at least 2, got " + std::to_string(grid));
  const auto d = m.div();
  const Poly2 dd = ref_divdiv(m);
  std::vector<FieldSample> out;
  out.reserve(static_cast<std::size_t>(grid * grid));
  for (int j = 0; j < grid; ++j) {
    const double y = -1.0 + 2.0 * j / (grid - 1);
    for (int i = 0; i < grid; ++i) {
      const double x = -1.0 + 2.0 * i / (grid - 1);
      out.push_back({x, y, m.xx(x, y), m.xy(x, y), m.yy(x, y), d[0](x, y), d[1](x, y), dd(x, y)});
    }
  }
  return out;
}

}  // namespace ddiv
