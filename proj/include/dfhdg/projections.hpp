#pragma once

// Local projections onto cell and edge polynomials and onto the
// Raviart-Thomas and Brezzi-Douglas-Marini spaces.
//
// RT and BDM fields are stored per cell in a local basis of scaled monomials
// centred at the cell barycentre, (x - x_T) / h_T:
//   BDM_r = [P_r]^2 :  (m, 0) for every monomial m, then (0, m)
//   RT_r  = BDM_r + x P~_r : additionally (x m, y m) for the degree-r monomials m
// Cell L2 projections use the orthonormal reference basis, edge projections
// the orthonormal edge basis parametrized from the low to the high vertex.

#include <stdexcept>
#include <string>
#include <vector>

#include "dfhdg/femcore.hpp"
#include "dfhdg/hdgforms.hpp"
#include "dfhdg/mesh.hpp"

namespace dfhdg {

enum class ProjectionSpace { cell_polynomial, edge_polynomial, raviart_thomas, bdm };

/// Singular local moment system or unsupported degree.
class ProjectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Local coefficients of a projected field: one block per cell, or per edge
/// for edge_polynomial.
struct ProjectedField {
  ProjectionSpace space = ProjectionSpace::cell_polynomial;
  int degree = 0;
  std::vector<Vector> blocks;

  /// Dimension of the local target space.
  int local_dim() const { return local_dimension(space, degree); }
  static int local_dimension(ProjectionSpace space, int r);
};

/// L2 projection onto P_r on every cell.
ProjectedField project_l2_cell(const Mesh& mesh, const ScalarField& v, int r);

/// L2 projection onto P_r(E) on every edge.
ProjectedField project_l2_edge(const Mesh& mesh, const ScalarField& v, int r);

/// Raviart-Thomas projection (r >= 0): normal moments against P_r(E) on every
/// edge and, for r >= 1, moments against [P_{r-1}]^2 on the cell.
ProjectedField project_rt(const Mesh& mesh, const VectorField& v, int r);

/// BDM projection (r >= 1): normal moments against P_r(E), moments against
/// grad P_{r-1} and against curl(b_T P_{r-2}), b_T the cubic bubble.
ProjectedField project_bdm(const Mesh& mesh, const VectorField& v, int r);

/// Value of a cell field at a physical point x of `cell`.
Real evaluate_scalar(const Mesh& mesh, const ProjectedField& f, int cell, const Vec2& x);
/// Value of an RT/BDM field at a physical point x of `cell`.
Vec2 evaluate_vector(const Mesh& mesh, const ProjectedField& f, int cell, const Vec2& x);
/// Divergence of an RT/BDM field at a physical point x of `cell`.
Real evaluate_divergence(const Mesh& mesh, const ProjectedField& f, int cell, const Vec2& x);
/// Value of an edge field at the parameter t in [0, 1] (low to high vertex).
Real evaluate_edge(const ProjectedField& f, int edge, Real t);

/// ||v - f||_0 over the mesh with a rule of the given degree.
Real l2_error(const Mesh& mesh, const ProjectedField& f, const ScalarField& v, int quad_degree = 20);
Real l2_error(const Mesh& mesh, const ProjectedField& f, const VectorField& v, int quad_degree = 20);
/// max over edges of ||v - f||_{0,E}.
Real max_edge_error(const Mesh& mesh, const ProjectedField& f, const ScalarField& v, int quad_degree = 20);

}  // namespace dfhdg
