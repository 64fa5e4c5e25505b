#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dfhdg/femcore.hpp"

namespace dfhdg {

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Local edge of a cell. Local edge i is opposite local vertex i and is
/// traversed counter-clockwise; `sign` maps the stored edge normal onto the
/// cell's outward normal.
struct CellEdge {
  int edge = -1;
  int sign = 1;
};

/// Conforming triangulation with derived edge topology.
///
/// Edges are stored as (low, high) vertex pairs and parametrized from the low
/// to the high vertex. The stored normal is the tangent rotated by -90
/// degrees, which is the outward normal of any counter-clockwise cell that
/// traverses the edge from low to high.
class Mesh {
 public:
  Mesh() = default;

  /// Builds topology from vertices and cells. Clockwise cells are reoriented;
  /// degenerate cells, dangling indices and non-manifold edges throw MeshError.
  static Mesh from_cells(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> cells);

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_cells() const { return static_cast<int>(cells_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_boundary_edges() const;

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& cells() const { return cells_; }
  const std::vector<std::array<int, 2>>& edges() const { return edges_; }

  const Vec2& vertex(int v) const { return vertices_[v]; }
  const std::array<int, 3>& cell(int c) const { return cells_[c]; }
  const std::array<int, 2>& edge(int e) const { return edges_[e]; }
  const std::array<CellEdge, 3>& cell_edges(int c) const { return cell_edges_[c]; }
  /// Incident cells; the second entry is -1 on boundary edges.
  const std::array<int, 2>& edge_cells(int e) const { return edge_cells_[e]; }
  bool is_boundary(int e) const { return boundary_[e] != 0; }

  Real cell_area(int c) const { return area_[c]; }
  Real cell_diameter(int c) const { return h_cell_[c]; }
  Real edge_length(int e) const { return h_edge_[e]; }
  Real max_cell_diameter() const;
  const Vec2& edge_normal(int e) const { return normal_[e]; }
  /// Outward normal of cell c on its local edge i.
  Vec2 outward_normal(int c, int i) const {
    return static_cast<Real>(cell_edges_[c][i].sign) * normal_[cell_edges_[c][i].edge];
  }

  AffineMap cell_map(int c) const {
    const auto& t = cells_[c];
    return AffineMap::from_vertices(vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]);
  }
  EdgeMap edge_map(int e) const { return {vertices_[edges_[e][0]], vertices_[edges_[e][1]]}; }

 private:
  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 3>> cells_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<std::array<CellEdge, 3>> cell_edges_;
  std::vector<std::array<int, 2>> edge_cells_;
  std::vector<char> boundary_;
  std::vector<Real> area_, h_cell_, h_edge_;
  std::vector<Vec2> normal_;
};

/// Uniform n x n grid of the unit square, each square split by the
/// lower-left to upper-right diagonal.
Mesh build_uniform_mesh(int n);

/// Parses Triangle-style .node and .ele text. Indices may be 0- or 1-based;
/// the base is taken from the smallest node id.
Mesh import_triangle_mesh(std::string_view node_text, std::string_view ele_text);

/// Serializes a mesh to .node / .ele text (1-based ids).
std::string to_node_text(const Mesh& mesh);
std::string to_ele_text(const Mesh& mesh);

}  // namespace dfhdg
