#include "dfhdg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace dfhdg {

namespace {

Real signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

// Splits text into non-empty, non-comment lines, each tokenized on whitespace.
std::vector<std::vector<std::string>> tokenize(std::string_view text) {
  std::vector<std::vector<std::string>> lines;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> tokens;
    for (std::string tok; ls >> tok;) tokens.push_back(tok);
    if (!tokens.empty()) lines.push_back(std::move(tokens));
  }
  return lines;
}

long parse_int(const std::string& tok, const char* what) {
  try {
    std::size_t pos = 0;
    long v = std::stol(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw MeshError(std::string("malformed ") + what + ": '" + tok + "'");
  }
}

Real parse_real(const std::string& tok, const char* what) {
  try {
    std::size_t pos = 0;
    Real v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw MeshError(std::string("malformed ") + what + ": '" + tok + "'");
  }
}

}  // namespace

Mesh Mesh::from_cells(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> cells) {
  Mesh mesh;
  const int nv = static_cast<int>(vertices.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    auto& t = cells[c];
    for (int v : t)
      if (v < 0 || v >= nv)
        throw MeshError("cell " + std::to_string(c) + " references vertex " + std::to_string(v) +
                        " outside [0, " + std::to_string(nv) + ")");
    const Real a = signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
    if (!(std::abs(a) > 0.0)) throw MeshError("cell " + std::to_string(c) + " has zero area");
    if (a < 0) std::swap(t[1], t[2]);
  }
  mesh.vertices_ = std::move(vertices);
  mesh.cells_ = std::move(cells);

  const int nc = mesh.num_cells();
  std::map<std::pair<int, int>, int> edge_index;
  mesh.cell_edges_.resize(nc);
  for (int c = 0; c < nc; ++c) {
    const auto& t = mesh.cells_[c];
    for (int i = 0; i < 3; ++i) {
      const int a = t[(i + 1) % 3], b = t[(i + 2) % 3];
      const auto key = std::minmax(a, b);
      auto [it, inserted] = edge_index.try_emplace({key.first, key.second}, mesh.num_edges());
      if (inserted) {
        mesh.edges_.push_back({key.first, key.second});
        mesh.edge_cells_.push_back({c, -1});
      } else {
        auto& ec = mesh.edge_cells_[it->second];
        if (ec[1] != -1)
          throw MeshError("edge (" + std::to_string(key.first) + ", " + std::to_string(key.second) +
                          ") has more than two incident cells");
        ec[1] = c;
      }
      mesh.cell_edges_[c][i] = {it->second, a < b ? 1 : -1};
    }
  }

  const int ne = mesh.num_edges();
  mesh.boundary_.resize(ne);
  mesh.h_edge_.resize(ne);
  mesh.normal_.resize(ne);
  for (int e = 0; e < ne; ++e) {
    mesh.boundary_[e] = mesh.edge_cells_[e][1] == -1;
    const Vec2 t = mesh.vertices_[mesh.edges_[e][1]] - mesh.vertices_[mesh.edges_[e][0]];
    mesh.h_edge_[e] = t.norm();
    mesh.normal_[e] = Vec2(t.y(), -t.x()) / t.norm();
  }
  mesh.area_.resize(nc);
  mesh.h_cell_.resize(nc);
  for (int c = 0; c < nc; ++c) {
    const auto& t = mesh.cells_[c];
    mesh.area_[c] = signed_area(mesh.vertices_[t[0]], mesh.vertices_[t[1]], mesh.vertices_[t[2]]);
    Real h = 0;
    for (const auto& ce : mesh.cell_edges_[c]) h = std::max(h, mesh.h_edge_[ce.edge]);
    mesh.h_cell_[c] = h;
  }
  return mesh;
}

int Mesh::num_boundary_edges() const {
  return static_cast<int>(std::count(boundary_.begin(), boundary_.end(), char{1}));
}

Real Mesh::max_cell_diameter() const {
  return h_cell_.empty() ? 0.0 : *std::max_element(h_cell_.begin(), h_cell_.end());
}

Mesh build_uniform_mesh(int n) {
  if (n < 1) throw MeshError("uniform mesh needs n >= 1");
  std::vector<Vec2> vertices;
  vertices.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) vertices.emplace_back(Real(i) / n, Real(j) / n);
  std::vector<std::array<int, 3>> cells;
  cells.reserve(2 * n * n);
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      cells.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return Mesh::from_cells(std::move(vertices), std::move(cells));
}

Mesh import_triangle_mesh(std::string_view node_text, std::string_view ele_text) {
  const auto nodes = tokenize(node_text);
  if (nodes.empty() || nodes[0].size() < 2) throw MeshError("malformed .node header");
  const long n_nodes = parse_int(nodes[0][0], ".node header");
  const long dim = parse_int(nodes[0][1], ".node header");
  if (dim != 2) throw MeshError(".node dimension must be 2, got " + std::to_string(dim));
  if (n_nodes < 3 || static_cast<long>(nodes.size()) - 1 < n_nodes)
    throw MeshError(".node header announces " + std::to_string(n_nodes) + " nodes but " +
                    std::to_string(nodes.size() - 1) + " are present");

  std::vector<long> ids(n_nodes);
  std::vector<Vec2> vertices(n_nodes);
  for (long i = 0; i < n_nodes; ++i) {
    const auto& row = nodes[i + 1];
    if (row.size() < 3) throw MeshError(".node line " + std::to_string(i + 1) + " has fewer than 3 fields");
    ids[i] = parse_int(row[0], "node id");
    vertices[i] = Vec2(parse_real(row[1], "coordinate"), parse_real(row[2], "coordinate"));
  }
  const long base = *std::min_element(ids.begin(), ids.end());
  if (base != 0 && base != 1) throw MeshError("node ids must start at 0 or 1");
  for (long i = 0; i < n_nodes; ++i)
    if (ids[i] != i + base) throw MeshError("node ids must be consecutive");

  const auto eles = tokenize(ele_text);
  if (eles.empty() || eles[0].size() < 2) throw MeshError("malformed .ele header");
  const long n_cells = parse_int(eles[0][0], ".ele header");
  const long per_cell = parse_int(eles[0][1], ".ele header");
  if (per_cell != 3) throw MeshError("only 3-node triangles are supported");
  if (n_cells < 1 || static_cast<long>(eles.size()) - 1 < n_cells)
    throw MeshError(".ele header announces " + std::to_string(n_cells) + " triangles but " +
                    std::to_string(eles.size() - 1) + " are present");
  std::vector<std::array<int, 3>> cells(n_cells);
  for (long c = 0; c < n_cells; ++c) {
    const auto& row = eles[c + 1];
    if (row.size() < 4) throw MeshError(".ele line " + std::to_string(c + 1) + " has fewer than 4 fields");
    for (int i = 0; i < 3; ++i) {
      const long v = parse_int(row[i + 1], "vertex index") - base;
      if (v < 0 || v >= n_nodes)
        throw MeshError("triangle " + std::to_string(c) + " references vertex " + row[i + 1] +
                        " which is out of range");
      cells[c][i] = static_cast<int>(v);
    }
  }
  return Mesh::from_cells(std::move(vertices), std::move(cells));
}

std::string to_node_text(const Mesh& mesh) {
  std::ostringstream out;
  out.precision(17);
  out << mesh.num_vertices() << " 2 0 0\n";
  for (int v = 0; v < mesh.num_vertices(); ++v)
    out << v + 1 << ' ' << mesh.vertex(v).x() << ' ' << mesh.vertex(v).y() << '\n';
  return out.str();
}

std::string to_ele_text(const Mesh& mesh) {
  std::ostringstream out;
  out << mesh.num_cells() << " 3 0\n";
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& t = mesh.cell(c);
    out << c + 1 << ' ' << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
  return out.str();
}

}  // namespace dfhdg
