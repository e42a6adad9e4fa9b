#include "ddiv/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "ddiv/error.hpp"

namespace ddiv {

namespace {

std::string cell_name(std::size_t k) { return "cell " + std::to_string(k); }

}  // namespace

Mesh::Mesh(std::vector<Eigen::Vector2d> vertices, std::vector<std::array<int, 4>> cells,
           const BoundaryClassifier& classify)
    : vertices_(std::move(vertices)), cells_(std::move(cells)) {
  const int nv = num_vertices();
  if (cells_.empty()) throw GeometryError("mesh has no cells");

  std::map<std::pair<int, int>, int> edge_ids;
  cell_edges_.resize(cells_.size());
  patches_.resize(vertices_.size());
  diameters_.resize(cells_.size());

  for (std::size_t k = 0; k < cells_.size(); ++k) {
    const auto& c = cells_[k];
    for (int v : c)
      if (v < 0 || v >= nv) throw GeometryError(cell_name(k) + " references vertex " + std::to_string(v));
    const Eigen::Vector2d& p0 = vertices_[static_cast<std::size_t>(c[0])];
    const Eigen::Vector2d& p1 = vertices_[static_cast<std::size_t>(c[1])];
    const Eigen::Vector2d& p2 = vertices_[static_cast<std::size_t>(c[2])];
    const Eigen::Vector2d& p3 = vertices_[static_cast<std::size_t>(c[3])];
    const double hk = std::max((p2 - p0).norm(), (p3 - p1).norm());
    if (!(hk > 0.0)) throw GeometryError(cell_name(k) + " is degenerate");
    if ((p0 - p1 + p2 - p3).norm() > 1e-12 * hk)
      throw GeometryError(cell_name(k) + " is not a parallelogram");
    Eigen::Matrix2d b;
    b.col(0) = 0.5 * (p1 - p0);
    b.col(1) = 0.5 * (p3 - p0);
    if (!(b.determinant() > 0.0))
      throw GeometryError(cell_name(k) + " is not counterclockwise or is degenerate");
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(b);
    const double ratio = svd.singularValues()(0) / svd.singularValues()(1);
    if (!(ratio <= kMaxAspect)) throw GeometryError(cell_name(k) + " violates shape regularity");
    max_aspect_ = std::max(max_aspect_, ratio);
    diameters_[k] = hk;
    h_ = std::max(h_, hk);

    for (int j = 0; j < 4; ++j) {
      const int a = c[static_cast<std::size_t>(j)];
      const int bb = c[static_cast<std::size_t>((j + 1) % 4)];
      const auto key = std::minmax(a, bb);
      auto [it, inserted] = edge_ids.try_emplace(key, num_edges());
      if (inserted) {
        MeshEdge e;
        e.v = {key.first, key.second};
        e.cells = {static_cast<int>(k), -1};
        edges_.push_back(e);
      } else {
        MeshEdge& e = edges_[static_cast<std::size_t>(it->second)];
        if (e.cells[1] != -1 || e.cells[0] == static_cast<int>(k))
          throw GeometryError("edge " + std::to_string(a) + "-" + std::to_string(bb) +
                              " has more than two adjacent cells");
        e.cells[1] = static_cast<int>(k);
      }
      cell_edges_[k][static_cast<std::size_t>(j)] = it->second;
      patches_[static_cast<std::size_t>(a)].push_back({static_cast<int>(k), j});
    }
  }

  std::vector<bool> on_boundary(vertices_.size(), false);
  std::vector<bool> touches_dirichlet(vertices_.size(), false);
  for (auto& e : edges_) {
    if (e.cells[1] != -1) continue;
    e.kind = classify(e.v[0], e.v[1]);
    if (e.kind == EdgeKind::Interior) throw PartitionError("boundary edge classified as interior");
    for (int v : e.v) {
      on_boundary[static_cast<std::size_t>(v)] = true;
      if (e.kind == EdgeKind::Dirichlet) touches_dirichlet[static_cast<std::size_t>(v)] = true;
    }
  }

  vertex_kinds_.resize(vertices_.size());
  for (int v = 0; v < nv; ++v) {
    const auto i = static_cast<std::size_t>(v);
    if (patches_[i].empty()) throw GeometryError("vertex " + std::to_string(v) + " is not used by any cell");
    if (!on_boundary[i]) {
      vertex_kinds_[i] = VertexKind::Interior;
      interior_vertices_.push_back(v);
    } else {
      vertex_kinds_[i] = touches_dirichlet[i] ? VertexKind::DirichletTouching : VertexKind::NeumannInterior;
    }
  }
}

int Mesh::cell_edge_sign(int k, int j) const {
  const auto& c = cell(k);
  return c[static_cast<std::size_t>(j)] < c[static_cast<std::size_t>((j + 1) % 4)] ? 1 : -1;
}

std::vector<int> Mesh::boundary_edges_at(int v) const {
  std::vector<int> out;
  for (const auto& [k, corner] : patch(v)) {
    for (int j : {corner, (corner + 3) % 4}) {
      const int e = cell_edge(k, j);
      if (edge(e).kind != EdgeKind::Interior && std::find(out.begin(), out.end(), e) == out.end())
        out.push_back(e);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

int Mesh::count_edges(EdgeKind kind) const {
  return static_cast<int>(std::count_if(edges_.begin(), edges_.end(),
                                        [kind](const MeshEdge& e) { return e.kind == kind; }));
}

namespace {

void check_level(int level) {
  if (level < 0 || level > 10) throw ParameterError("mesh level must be in [0, 10], got " + std::to_string(level));
}

}  // namespace

Mesh make_parallelogram_domain(const std::array<Eigen::Vector2d, 4>& corners, int level) {
  check_level(level);
  const Eigen::Vector2d e1 = corners[1] - corners[0];
  const Eigen::Vector2d e2 = corners[3] - corners[0];
  const double scale = std::max(e1.norm(), e2.norm());
  if (!(scale > 0.0) || (corners[0] - corners[1] + corners[2] - corners[3]).norm() > 1e-12 * scale)
    throw GeometryError("domain corners do not form a parallelogram");
  if (!(e1.x() * e2.y() - e1.y() * e2.x() > 1e-14 * scale * scale))
    throw GeometryError("domain corners are degenerate or clockwise");

  const int n = 1 << level;
  std::vector<Eigen::Vector2d> verts;
  verts.reserve(static_cast<std::size_t>((n + 1) * (n + 1)));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      verts.push_back(corners[0] + (static_cast<double>(i) / n) * e1 + (static_cast<double>(j) / n) * e2);
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<std::array<int, 4>> cells;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
  return Mesh(std::move(verts), std::move(cells), [](int, int) { return EdgeKind::Dirichlet; });
}

Mesh make_lshape(int level) {
  check_level(level);
  const int n = 1 << level;
  const int side = 2 * n + 1;
  auto removed_vertex = [n](int i, int j) { return i < n && j < n; };
  std::vector<int> lattice(static_cast<std::size_t>(side * side), -1);
  std::vector<Eigen::Vector2d> verts;
  std::vector<std::array<int, 2>> coords;
  for (int j = 0; j < side; ++j) {
    for (int i = 0; i < side; ++i) {
      if (removed_vertex(i, j)) continue;
      lattice[static_cast<std::size_t>(j * side + i)] = static_cast<int>(verts.size());
      verts.emplace_back(-1.0 + static_cast<double>(i) / n, -1.0 + static_cast<double>(j) / n);
      coords.push_back({i, j});
    }
  }
  auto id = [&](int i, int j) { return lattice[static_cast<std::size_t>(j * side + i)]; };
  std::vector<std::array<int, 4>> cells;
  for (int j = 0; j < 2 * n; ++j)
    for (int i = 0; i < 2 * n; ++i) {
      if (i < n && j < n) continue;
      cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  auto classify = [coords, n](int va, int vb) {
    const auto& a = coords[static_cast<std::size_t>(va)];
    const auto& b = coords[static_cast<std::size_t>(vb)];
    const bool on_x_cut = a[1] == n && b[1] == n && a[0] <= n && b[0] <= n;
    const bool on_y_cut = a[0] == n && b[0] == n && a[1] <= n && b[1] <= n;
    return on_x_cut || on_y_cut ? EdgeKind::Dirichlet : EdgeKind::Neumann;
  };
  return Mesh(std::move(verts), std::move(cells), classify);
}

Mesh refine_uniform(const Mesh& m) {
  const int nv = m.num_vertices();
  const int ne = m.num_edges();
  std::vector<Eigen::Vector2d> verts = m.vertices();
  verts.reserve(static_cast<std::size_t>(nv + ne + m.num_cells()));
  for (const auto& e : m.edges()) verts.push_back(0.5 * (m.vertex(e.v[0]) + m.vertex(e.v[1])));
  for (const auto& c : m.cells()) verts.push_back(0.5 * (m.vertex(c[0]) + m.vertex(c[2])));

  std::vector<std::array<int, 4>> cells;
  cells.reserve(static_cast<std::size_t>(4 * m.num_cells()));
  for (int k = 0; k < m.num_cells(); ++k) {
    const auto& c = m.cell(k);
    std::array<int, 4> mid{};
    for (int j = 0; j < 4; ++j) mid[static_cast<std::size_t>(j)] = nv + m.cell_edge(k, j);
    const int ctr = nv + ne + k;
    cells.push_back({c[0], mid[0], ctr, mid[3]});
    cells.push_back({mid[0], c[1], mid[1], ctr});
    cells.push_back({ctr, mid[1], c[2], mid[2]});
    cells.push_back({mid[3], ctr, mid[2], c[3]});
  }
  auto classify = [&m, nv, ne](int va, int vb) {
    const int mv = va >= nv ? va : vb;
    if (mv < nv || mv >= nv + ne) throw GeometryError("refined boundary edge has no parent edge");
    return m.edge(mv - nv).kind;
  };
  return Mesh(std::move(verts), std::move(cells), classify);
}

void write_mesh(std::ostream& os, const Mesh& m) {
  char buf[128];
  os << m.num_vertices() << ' ' << m.num_cells() << ' ' << m.num_edges() << '\n';
  for (const auto& v : m.vertices()) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.x(), v.y());
    os << buf;
  }
  for (const auto& c : m.cells()) os << c[0] << ' ' << c[1] << ' ' << c[2] << ' ' << c[3] << '\n';
  for (const auto& e : m.edges()) {
    if (e.kind == EdgeKind::Interior) continue;
    os << e.v[0] << ' ' << e.v[1] << ' ' << (e.kind == EdgeKind::Dirichlet ? 'D' : 'N') << '\n';
  }
}

Mesh read_mesh(std::istream& is) {
  int nv = 0, nk = 0, ne = 0;
  if (!(is >> nv >> nk >> ne) || nv <= 0 || nk <= 0 || ne <= 0) throw GeometryError("mesh file: bad header");
  std::vector<Eigen::Vector2d> verts(static_cast<std::size_t>(nv));
  for (auto& v : verts)
    if (!(is >> v.x() >> v.y())) throw GeometryError("mesh file: truncated vertex list");
  std::vector<std::array<int, 4>> cells(static_cast<std::size_t>(nk));
  for (auto& c : cells)
    if (!(is >> c[0] >> c[1] >> c[2] >> c[3])) throw GeometryError("mesh file: truncated cell list");
  std::map<std::pair<int, int>, EdgeKind> kinds;
  int a = 0, b = 0;
  std::string tag;
  while (is >> a >> b >> tag) {
    if (tag != "D" && tag != "N") throw PartitionError("mesh file: boundary tag must be D or N, got " + tag);
    kinds[std::minmax(a, b)] = tag == "D" ? EdgeKind::Dirichlet : EdgeKind::Neumann;
  }
  Mesh m(std::move(verts), std::move(cells), [&kinds](int va, int vb) {
    auto it = kinds.find(std::minmax(va, vb));
    if (it == kinds.end())
      throw PartitionError("mesh file: boundary edge " + std::to_string(va) + "-" + std::to_string(vb) +
                           " has no D/N tag");
    return it->second;
  });
  if (m.num_edges() != ne) throw GeometryError("mesh file: edge count does not match header");
  for (const auto& [key, kind] : kinds) {
    (void)kind;
    bool found = false;
    for (const auto& e : m.edges())
      if (e.v[0] == key.first && e.v[1] == key.second) found = e.kind != EdgeKind::Interior;
    if (!found) throw PartitionError("mesh file: tagged edge is not a boundary edge");
  }
  return m;
}

}  // namespace ddiv
