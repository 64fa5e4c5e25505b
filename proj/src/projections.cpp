#include "dfhdg/projections.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include "parallel.hpp"

namespace dfhdg {

namespace {

int rule_degree(int r) { return std::min(2 * r + 14, kMaxQuadratureDegree); }

// Scaled coordinates (x - x_T) / h_T of the local RT/BDM bases.
struct LocalFrame {
  Vec2 centre;
  Real h;
  Vec2 scaled(const Vec2& x) const { return (x - centre) / h; }
};

LocalFrame local_frame(const Mesh& mesh, int cell) {
  const auto& t = mesh.cell(cell);
  return {(mesh.vertex(t[0]) + mesh.vertex(t[1]) + mesh.vertex(t[2])) / 3.0, mesh.cell_diameter(cell)};
}

Real power(Real x, int n) { return n == 0 ? 1.0 : std::pow(x, n); }

// Values (2 x n) and divergences (n) of the local vector basis at scaled point s.
struct VectorBasisValues {
  Eigen::Matrix<Real, 2, Eigen::Dynamic> values;
  Vector divergence;
};

VectorBasisValues vector_basis(ProjectionSpace space, int r, const Vec2& s, Real h) {
  const auto exps = monomial_exponents(r);
  const int np = static_cast<int>(exps.size());
  const int n = ProjectedField::local_dimension(space, r);
  VectorBasisValues out{Eigen::Matrix<Real, 2, Eigen::Dynamic>::Zero(2, n), Vector::Zero(n)};
  for (int j = 0; j < np; ++j) {
    const auto [a, b] = exps[j];
    const Real m = power(s.x(), a) * power(s.y(), b);
    out.values(0, j) = m;
    out.values(1, np + j) = m;
    out.divergence(j) = a > 0 ? a * power(s.x(), a - 1) * power(s.y(), b) / h : 0.0;
    out.divergence(np + j) = b > 0 ? b * power(s.x(), a) * power(s.y(), b - 1) / h : 0.0;
  }
  if (space == ProjectionSpace::raviart_thomas) {
    int col = 2 * np;
    for (int j = np - (r + 1); j < np; ++j, ++col) {
      const auto [a, b] = exps[j];
      const Real m = power(s.x(), a) * power(s.y(), b);
      out.values(0, col) = s.x() * m;
      out.values(1, col) = s.y() * m;
      out.divergence(col) = (r + 2) * m / h;
    }
  }
  return out;
}

// Quadrature points and weights mapped to a physical cell.
struct PhysicalRule {
  Eigen::MatrixX2d points;
  Vector weights;
};

PhysicalRule cell_rule(const Mesh& mesh, int cell, const QuadRule<Real>& rule) {
  const AffineMap map = mesh.cell_map(cell);
  PhysicalRule out{Eigen::MatrixX2d(rule.size(), 2), rule.weights * std::abs(map.det)};
  for (Eigen::Index q = 0; q < rule.size(); ++q)
    out.points.row(q) = map.to_physical(Vec2(rule.points(q, 0), rule.points(q, 1))).transpose();
  return out;
}

// Test functions of the interior moments, evaluated at a physical point.
// RT: [P_{r-1}]^2. BDM: grad P_{r-1} (non-constant) followed by curl(b_T P_{r-2}).
Eigen::Matrix<Real, 2, Eigen::Dynamic> interior_tests(ProjectionSpace space, int r, const LocalFrame& frame,
                                                      const AffineMap& map, const Vec2& x) {
  const Vec2 s = frame.scaled(x);
  if (space == ProjectionSpace::raviart_thomas) {
    const auto exps = monomial_exponents(r - 1);
    const int np = static_cast<int>(exps.size());
    Eigen::Matrix<Real, 2, Eigen::Dynamic> w = Eigen::Matrix<Real, 2, Eigen::Dynamic>::Zero(2, 2 * np);
    for (int j = 0; j < np; ++j) {
      const Real m = power(s.x(), exps[j].first) * power(s.y(), exps[j].second);
      w(0, j) = m;
      w(1, np + j) = m;
    }
    return w;
  }
  const auto grad_exps = monomial_exponents(r - 1);
  const auto bubble_exps = monomial_exponents(r - 2);
  const int ng = static_cast<int>(grad_exps.size()) - 1;
  const int nb = static_cast<int>(bubble_exps.size());
  Eigen::Matrix<Real, 2, Eigen::Dynamic> w(2, ng + nb);
  for (int j = 0; j < ng; ++j) {
    const auto [a, b] = grad_exps[j + 1];
    w(0, j) = a > 0 ? a * power(s.x(), a - 1) * power(s.y(), b) : 0.0;
    w(1, j) = b > 0 ? b * power(s.x(), a) * power(s.y(), b - 1) : 0.0;
  }
  if (nb > 0) {
    const Vec2 xi = map.to_reference(x);
    const Real lam[3] = {1.0 - xi.x() - xi.y(), xi.x(), xi.y()};
    const Vec2 g1 = map.inverse.row(0).transpose(), g2 = map.inverse.row(1).transpose();
    const Vec2 glam[3] = {-(g1 + g2), g1, g2};
    const Real bubble = lam[0] * lam[1] * lam[2];
    const Vec2 grad_bubble = lam[1] * lam[2] * glam[0] + lam[0] * lam[2] * glam[1] + lam[0] * lam[1] * glam[2];
    for (int j = 0; j < nb; ++j) {
      const auto [a, b] = bubble_exps[j];
      const Real q = power(s.x(), a) * power(s.y(), b);
      const Vec2 grad_q(a > 0 ? a * power(s.x(), a - 1) * power(s.y(), b) / frame.h : 0.0,
                        b > 0 ? b * power(s.x(), a) * power(s.y(), b - 1) / frame.h : 0.0);
      const Vec2 g = q * grad_bubble + bubble * grad_q;
      w(0, ng + j) = g.y();
      w(1, ng + j) = -g.x();
    }
  }
  return w;
}

// Moment system of one cell for RT or BDM; rows are the defining moments.
Vector project_vector_cell(const Mesh& mesh, const VectorField& v, ProjectionSpace space, int r, int cell,
                           const QuadRule<Real>& tri, const QuadRule<Real>& seg) {
  const int n = ProjectedField::local_dimension(space, r);
  const LocalFrame frame = local_frame(mesh, cell);
  const AffineMap map = mesh.cell_map(cell);
  const EdgeBasis<> edge_basis(r);
  Matrix moments = Matrix::Zero(n, n);
  Vector rhs = Vector::Zero(n);
  int row = 0;
  for (int i = 0; i < 3; ++i) {
    const int e = mesh.cell_edges(cell)[i].edge;
    const EdgeMap em = mesh.edge_map(e);
    const Vec2 normal = mesh.edge_normal(e);
    for (Eigen::Index q = 0; q < seg.size(); ++q) {
      const Real t = seg.points(q, 0);
      const Vec2 x = em.to_physical(t);
      const Real w = seg.weights(q) * em.length();
      const Vector tests = edge_basis.values(t);
      const VectorBasisValues basis = vector_basis(space, r, frame.scaled(x), frame.h);
      const Vector bn = basis.values.transpose() * normal;
      const Real vn = v(x).dot(normal);
      moments.middleRows(row, r + 1) += w * tests * bn.transpose();
      rhs.segment(row, r + 1) += w * vn * tests;
    }
    row += r + 1;
  }
  if (row < n) {
    const PhysicalRule pr = cell_rule(mesh, cell, tri);
    for (Eigen::Index q = 0; q < pr.weights.size(); ++q) {
      const Vec2 x = pr.points.row(q).transpose();
      const auto tests = interior_tests(space, r, frame, map, x);
      const VectorBasisValues basis = vector_basis(space, r, frame.scaled(x), frame.h);
      moments.bottomRows(n - row) += pr.weights(q) * tests.transpose() * basis.values;
      rhs.tail(n - row) += pr.weights(q) * tests.transpose() * v(x);
    }
  }
  const Eigen::PartialPivLU<Matrix> lu(moments);
  const Real rc = lu.rcond();
  if (!(rc > 1e-13))
    throw ProjectionError((space == ProjectionSpace::raviart_thomas ? "RT" : "BDM") + std::string("_") +
                          std::to_string(r) + " moment matrix is singular on cell " + std::to_string(cell) +
                          " (rcond " + std::to_string(rc) + ")");
  return lu.solve(rhs);
}

ProjectedField project_vector(const Mesh& mesh, const VectorField& v, ProjectionSpace space, int r) {
  const QuadRule<Real> tri = make_quadrature(Domain::triangle, rule_degree(r + 1));
  const QuadRule<Real> seg = make_quadrature(Domain::segment, rule_degree(r + 1));
  ProjectedField out{space, r, std::vector<Vector>(mesh.num_cells())};
  detail::parallel_for(mesh.num_cells(),
                       [&](int c) { out.blocks[c] = project_vector_cell(mesh, v, space, r, c, tri, seg); });
  return out;
}

void require_space(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string(what) + ": field lives in the wrong space");
}

}  // namespace

int ProjectedField::local_dimension(ProjectionSpace space, int r) {
  switch (space) {
    case ProjectionSpace::cell_polynomial:
      return dim_pk(r);
    case ProjectionSpace::edge_polynomial:
      return r + 1;
    case ProjectionSpace::raviart_thomas:
      return (r + 1) * (r + 3);
    case ProjectionSpace::bdm:
      return (r + 1) * (r + 2);
  }
  return 0;
}

ProjectedField project_l2_cell(const Mesh& mesh, const ScalarField& v, int r) {
  if (r < 0) throw ProjectionError("projection degree must be nonnegative");
  const CellBasis<> basis = make_cell_basis(r);
  const QuadRule<Real> rule = make_quadrature(Domain::triangle, rule_degree(r));
  Matrix phi(rule.size(), basis.dim());
  for (Eigen::Index q = 0; q < rule.size(); ++q)
    phi.row(q) = basis.values(Vec2(rule.points(q, 0), rule.points(q, 1))).transpose();
  ProjectedField out{ProjectionSpace::cell_polynomial, r, std::vector<Vector>(mesh.num_cells())};
  detail::parallel_for(mesh.num_cells(), [&](int c) {
    const AffineMap map = mesh.cell_map(c);
    Vector vals(rule.size());
    for (Eigen::Index q = 0; q < rule.size(); ++q)
      vals(q) = v(map.to_physical(Vec2(rule.points(q, 0), rule.points(q, 1)))) * rule.weights(q);
    // The basis is orthonormal on the reference cell, so no mass solve is needed.
    out.blocks[c] = phi.transpose() * vals;
  });
  return out;
}

ProjectedField project_l2_edge(const Mesh& mesh, const ScalarField& v, int r) {
  if (r < 0) throw ProjectionError("projection degree must be nonnegative");
  const EdgeBasis<> basis(r);
  const QuadRule<Real> rule = make_quadrature(Domain::segment, rule_degree(r));
  ProjectedField out{ProjectionSpace::edge_polynomial, r, std::vector<Vector>(mesh.num_edges())};
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const EdgeMap em = mesh.edge_map(e);
    Vector c = Vector::Zero(basis.dim());
    for (Eigen::Index q = 0; q < rule.size(); ++q)
      c += rule.weights(q) * v(em.to_physical(rule.points(q, 0))) * basis.values(rule.points(q, 0));
    out.blocks[e] = c;
  }
  return out;
}

ProjectedField project_rt(const Mesh& mesh, const VectorField& v, int r) {
  if (r < 0) throw ProjectionError("RT projection degree must be nonnegative");
  return project_vector(mesh, v, ProjectionSpace::raviart_thomas, r);
}

ProjectedField project_bdm(const Mesh& mesh, const VectorField& v, int r) {
  if (r < 1) throw ProjectionError("BDM projection needs degree r >= 1, got " + std::to_string(r));
  return project_vector(mesh, v, ProjectionSpace::bdm, r);
}

Real evaluate_scalar(const Mesh& mesh, const ProjectedField& f, int cell, const Vec2& x) {
  require_space(f.space == ProjectionSpace::cell_polynomial, "evaluate_scalar");
  const CellBasis<> basis = make_cell_basis(f.degree);
  return basis.values(mesh.cell_map(cell).to_reference(x)).dot(f.blocks[cell]);
}

Vec2 evaluate_vector(const Mesh& mesh, const ProjectedField& f, int cell, const Vec2& x) {
  require_space(f.space == ProjectionSpace::raviart_thomas || f.space == ProjectionSpace::bdm,
                "evaluate_vector");
  const LocalFrame frame = local_frame(mesh, cell);
  return vector_basis(f.space, f.degree, frame.scaled(x), frame.h).values * f.blocks[cell];
}

Real evaluate_divergence(const Mesh& mesh, const ProjectedField& f, int cell, const Vec2& x) {
  require_space(f.space == ProjectionSpace::raviart_thomas || f.space == ProjectionSpace::bdm,
                "evaluate_divergence");
  const LocalFrame frame = local_frame(mesh, cell);
  return vector_basis(f.space, f.degree, frame.scaled(x), frame.h).divergence.dot(f.blocks[cell]);
}

Real evaluate_edge(const ProjectedField& f, int edge, Real t) {
  require_space(f.space == ProjectionSpace::edge_polynomial, "evaluate_edge");
  return EdgeBasis<>(f.degree).values(t).dot(f.blocks[edge]);
}

Real l2_error(const Mesh& mesh, const ProjectedField& f, const ScalarField& v, int quad_degree) {
  const QuadRule<Real> rule = make_quadrature(Domain::triangle, quad_degree);
  std::vector<Real> local(mesh.num_cells());
  detail::parallel_for(mesh.num_cells(), [&](int c) {
    const PhysicalRule pr = cell_rule(mesh, c, rule);
    Real s = 0;
    for (Eigen::Index q = 0; q < pr.weights.size(); ++q) {
      const Vec2 x = pr.points.row(q).transpose();
      const Real d = v(x) - evaluate_scalar(mesh, f, c, x);
      s += pr.weights(q) * d * d;
    }
    local[c] = s;
  });
  Real total = 0;
  for (Real s : local) total += s;
  return std::sqrt(total);
}

Real l2_error(const Mesh& mesh, const ProjectedField& f, const VectorField& v, int quad_degree) {
  const QuadRule<Real> rule = make_quadrature(Domain::triangle, quad_degree);
  std::vector<Real> local(mesh.num_cells());
  detail::parallel_for(mesh.num_cells(), [&](int c) {
    const PhysicalRule pr = cell_rule(mesh, c, rule);
    Real s = 0;
    for (Eigen::Index q = 0; q < pr.weights.size(); ++q) {
      const Vec2 x = pr.points.row(q).transpose();
      s += pr.weights(q) * (v(x) - evaluate_vector(mesh, f, c, x)).squaredNorm();
    }
    local[c] = s;
  });
  Real total = 0;
  for (Real s : local) total += s;
  return std::sqrt(total);
}

Real max_edge_error(const Mesh& mesh, const ProjectedField& f, const ScalarField& v, int quad_degree) {
  const QuadRule<Real> rule = make_quadrature(Domain::segment, quad_degree);
  Real worst = 0;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const EdgeMap em = mesh.edge_map(e);
    Real s = 0;
    for (Eigen::Index q = 0; q < rule.size(); ++q) {
      const Real t = rule.points(q, 0);
      const Real d = v(em.to_physical(t)) - evaluate_edge(f, e, t);
      s += rule.weights(q) * em.length() * d * d;
    }
    worst = std::max(worst, std::sqrt(s));
  }
  return worst;
}

}  // namespace dfhdg
