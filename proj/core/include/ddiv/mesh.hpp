#pragma once

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

namespace ddiv {

enum class EdgeKind { Interior, Dirichlet, Neumann };

enum class VertexKind {
  Interior,
  /// On the boundary and touching at least one Dirichlet edge.
  DirichletTouching,
  /// On the boundary with all incident boundary edges Neumann.
  NeumannInterior
};

/// Edges are globally oriented from the lower to the higher vertex index.
struct MeshEdge {
  std::array<int, 2> v{};
  EdgeKind kind = EdgeKind::Interior;
  /// Adjacent cells; cells[1] is -1 on the boundary.
  std::array<int, 2> cells{-1, -1};
};

struct CornerRef {
  int cell;
  int corner;
};

/// Chooses Dirichlet or Neumann for a boundary edge given its endpoint indices.
using BoundaryClassifier = std::function<EdgeKind(int va, int vb)>;

/// Conforming mesh of parallelograms.  Immutable once constructed; the
/// constructor derives all topology and throws GeometryError on invalid input.
class Mesh {
 public:
  static constexpr double kMaxAspect = 10.0;

  Mesh(std::vector<Eigen::Vector2d> vertices, std::vector<std::array<int, 4>> cells,
       const BoundaryClassifier& classify);

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_cells() const { return static_cast<int>(cells_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const Eigen::Vector2d& vertex(int v) const { return vertices_[static_cast<std::size_t>(v)]; }
  const std::array<int, 4>& cell(int k) const { return cells_[static_cast<std::size_t>(k)]; }
  const MeshEdge& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }
  const std::vector<Eigen::Vector2d>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 4>>& cells() const { return cells_; }
  const std::vector<MeshEdge>& edges() const { return edges_; }

  /// Global edge of local edge j (from corner j to corner j+1) of cell k.
  int cell_edge(int k, int j) const { return cell_edges_[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]; }
  /// +1 if the cell traverses local edge j along its global orientation, else -1.
  int cell_edge_sign(int k, int j) const;

  /// Interior vertices (the constrained set), ascending.
  const std::vector<int>& interior_vertices() const { return interior_vertices_; }
  /// Cells around v with the local corner index, ascending by cell.
  const std::vector<CornerRef>& patch(int v) const { return patches_[static_cast<std::size_t>(v)]; }
  VertexKind vertex_kind(int v) const { return vertex_kinds_[static_cast<std::size_t>(v)]; }
  /// Boundary edges incident to v.
  std::vector<int> boundary_edges_at(int v) const;

  double cell_diameter(int k) const { return diameters_[static_cast<std::size_t>(k)]; }
  double h() const { return h_; }
  /// Largest singular-value ratio of the cell maps.
  double max_aspect() const { return max_aspect_; }
  /// #V - #E + #K.
  int euler_characteristic() const { return num_vertices() - num_edges() + num_cells(); }

  int count_edges(EdgeKind kind) const;

 private:
  std::vector<Eigen::Vector2d> vertices_;
  std::vector<std::array<int, 4>> cells_;
  std::vector<MeshEdge> edges_;
  std::vector<std::array<int, 4>> cell_edges_;
  std::vector<int> interior_vertices_;
  std::vector<std::vector<CornerRef>> patches_;
  std::vector<VertexKind> vertex_kinds_;
  std::vector<double> diameters_;
  double h_ = 0.0;
  double max_aspect_ = 1.0;
};

/// Uniform 2^L x 2^L subdivision of the parallelogram with counterclockwise
/// corners c0..c3; every boundary edge is Dirichlet.
Mesh make_parallelogram_domain(const std::array<Eigen::Vector2d, 4>& corners, int level);

/// (-1,1)^2 minus [-1,0]^2 with 3 * 4^L squares.  Edges on (-1,0]x{0} and
/// {0}x(-1,0] are Dirichlet, the rest of the boundary Neumann.
Mesh make_lshape(int level);

/// Splits every cell into four through edge midpoints and its center.
/// Boundary kinds are inherited.
Mesh refine_uniform(const Mesh& m);

/// Text format: "#V #K #E", then vertex lines "x y", cell lines "v0 v1 v2 v3",
/// and one line "va vb D|N" per boundary edge.
void write_mesh(std::ostream& os, const Mesh& m);
Mesh read_mesh(std::istream& is);

}  // namespace ddiv
