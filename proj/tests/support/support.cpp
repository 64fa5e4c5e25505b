#include "support.hpp"

namespace dfhdg::testing {

namespace {

constexpr int kRuleDegree = 30;

const QuadRule<Real>& triangle_rule() {
  static const QuadRule<Real> rule = make_quadrature(Domain::triangle, kRuleDegree);
  return rule;
}

const QuadRule<Real>& segment_rule() {
  static const QuadRule<Real> rule = make_quadrature(Domain::segment, kRuleDegree);
  return rule;
}

}  // namespace

Vector project_cell(const Discretization& disc, int cell, int degree, const ScalarField& f) {
  const CellBasis<> basis = make_cell_basis(degree);
  const AffineMap map = disc.mesh().cell_map(cell);
  const auto& rule = triangle_rule();
  Vector c = Vector::Zero(basis.dim());
  for (Eigen::Index q = 0; q < rule.size(); ++q) {
    const Vec2 xi(rule.points(q, 0), rule.points(q, 1));
    c += rule.weights(q) * f(map.to_physical(xi)) * basis.values(xi);
  }
  return c;
}

Vector project_edge(const Discretization& disc, int edge, const ScalarField& g) {
  const EdgeMap em = disc.mesh().edge_map(edge);
  const auto& rule = segment_rule();
  Vector c = Vector::Zero(disc.trace_basis().dim());
  for (Eigen::Index q = 0; q < rule.size(); ++q) {
    const Real t = rule.points(q, 0);
    c += rule.weights(q) * g(em.to_physical(t)) * disc.trace_basis().values(t);
  }
  return c;
}

Vector exact_tensor(const Discretization& disc, int cell, const TensorField& g) {
  const DofLayout& l = disc.layout();
  Vector out(l.n_L);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out.segment((2 * i + j) * l.dim_tensor, l.dim_tensor) =
          project_cell(disc, cell, l.m, [&](const Vec2& x) { return g(x)(i, j); });
  return out;
}

Vector exact_velocity_pair(const Discretization& disc, int cell, const VectorField& u) {
  const DofLayout& l = disc.layout();
  Vector out(l.n_u + 3 * l.n_uhat);
  for (int c = 0; c < 2; ++c)
    out.segment(c * l.dim_velocity, l.dim_velocity) =
        project_cell(disc, cell, l.k, [&](const Vec2& x) { return u(x)(c); });
  for (int i = 0; i < 3; ++i) {
    const int e = disc.mesh().cell_edges(cell)[i].edge;
    for (int c = 0; c < 2; ++c)
      out.segment(l.n_u + i * l.n_uhat + c * l.dim_edge, l.dim_edge) =
          project_edge(disc, e, [&](const Vec2& x) { return u(x)(c); });
  }
  return out;
}

Vector exact_pressure_pair(const Discretization& disc, int cell, const ScalarField& p) {
  const DofLayout& l = disc.layout();
  Vector out(l.n_p + 3 * l.n_phat);
  out.head(l.n_p) = project_cell(disc, cell, l.k - 1, p);
  for (int i = 0; i < 3; ++i)
    out.segment(l.n_p + i * l.n_phat, l.n_phat) = -project_edge(disc, disc.mesh().cell_edges(cell)[i].edge, p);
  return out;
}

FieldState interpolate_state(const Discretization& disc, const VectorField& u, const TensorField& grad_u,
                             const ScalarField& p) {
  const DofLayout& l = disc.layout();
  const Mesh& mesh = disc.mesh();
  FieldState s = FieldState::zeros(l);
  for (int c = 0; c < l.num_cells; ++c) {
    const int base = l.interior_offset(c);
    s.interior.segment(base, l.n_L) =
        exact_tensor(disc, c, [&](const Vec2& x) -> Mat2 { return disc.nu() * grad_u(x); });
    s.interior.segment(base + l.n_L, l.n_u) = exact_velocity_pair(disc, c, u).head(l.n_u);
    s.interior.segment(base + l.n_L + l.n_u, l.n_p) = project_cell(disc, c, l.k - 1, p);
  }
  for (int e = 0; e < l.num_edges; ++e) {
    if (!mesh.is_boundary(e))
      for (int c = 0; c < 2; ++c)
        s.trace.segment(l.uhat_offset[e] + c * l.dim_edge, l.dim_edge) =
            project_edge(disc, e, [&](const Vec2& x) { return u(x)(c); });
    s.trace.segment(l.phat_offset[e], l.n_phat) = -project_edge(disc, e, p);
  }
  return s;
}

Vector random_vector(Eigen::Index n, std::mt19937& rng) {
  std::uniform_real_distribution<Real> dist(-1.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

FieldState random_state(const DofLayout& layout, std::mt19937& rng) {
  FieldState s;
  s.interior = random_vector(layout.num_interior(), rng);
  s.trace = random_vector(layout.num_trace, rng);
  s.multiplier = random_vector(1, rng)(0);
  return s;
}

Mesh perturbed_mesh(int n, Real amplitude, unsigned seed) {
  const Mesh base = build_uniform_mesh(n);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<Real> dist(-amplitude / n, amplitude / n);
  std::vector<Vec2> vertices = base.vertices();
  for (auto& v : vertices) {
    const bool on_boundary = v.x() == 0.0 || v.x() == 1.0 || v.y() == 0.0 || v.y() == 1.0;
    if (!on_boundary) v += Vec2(dist(rng), dist(rng));
  }
  return Mesh::from_cells(std::move(vertices), base.cells());
}

}  // namespace dfhdg::testing
