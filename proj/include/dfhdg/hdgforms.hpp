#pragma once

// Degree-of-freedom layout and element-level forms of the hybridized
// divergence-free discretization of the stationary Navier-Stokes equations
//
//   a_h(L, G)        = nu^-1 (L, G)_T
//   c_h(U, G)        = (u, div G)_T - <u^, G n>_dT
//   d_h(V, P)        = (div v, p)_T + <v.n, p^>_dT
//   s_h(U, V)        = nu <tau (u - u^), v - v^>_dT,        tau = 1 / h
//   b_h(W; U, V)     = 1/2 (v (x) w, grad u)_T - 1/2 <(w^.n) v^, u>_dT
//                    - 1/2 (u (x) w, grad v)_T + 1/2 <(w^.n) u^, v>_dT
//
// with U = (u, u^), V = (v, v^), P = (p, p^). The convective form b_h is
// antisymmetric in (U, V) by construction. The penalty length h is the cell
// diameter by default, or the edge length.

#include <array>
#include <functional>
#include <vector>

#include "dfhdg/femcore.hpp"
#include "dfhdg/mesh.hpp"

namespace dfhdg {

using VectorField = std::function<Vec2(const Vec2&)>;
using ScalarField = std::function<Real(const Vec2&)>;

/// Sizes and global offsets of all unknowns.
///
/// Interior unknowns are blocked per cell as [L | u | p]; L stores the four
/// tensor components (row-major, (0,0),(0,1),(1,0),(1,1)) and u its two
/// components, each as a block of scalar coefficients. Trace unknowns are
/// numbered [u^ on interior edges | p^ on all edges], followed by the
/// zero-mean multiplier.
struct DofLayout {
  int k = 1;
  int m = 1;
  int dim_velocity = 0;  // dim P_k
  int dim_tensor = 0;    // dim P_m
  int dim_pressure = 0;  // dim P_{k-1}
  int dim_edge = 0;      // dim P_k(E)

  int n_L = 0, n_u = 0, n_p = 0;   // per cell
  int n_uhat = 0, n_phat = 0;      // per edge

  int num_cells = 0;
  int num_edges = 0;
  std::vector<int> uhat_offset;  // per edge, -1 on boundary edges
  std::vector<int> phat_offset;  // per edge
  int num_uhat = 0;
  int num_trace = 0;

  int n_interior() const { return n_L + n_u + n_p; }
  int num_interior() const { return num_cells * n_interior(); }
  int interior_offset(int cell) const { return cell * n_interior(); }
  int multiplier_index() const { return num_trace; }
  int condensed_size() const { return num_trace + 1; }
  int monolithic_size() const { return num_interior() + num_trace + 1; }
};

/// m defaults to k when negative. Requires k >= 1 and m in {k-1, k}.
DofLayout make_dof_layout(const Mesh& mesh, int k, int m = -1);

/// Coefficient vectors of (L_h, u_h, p_h), (u^_h, p^_h) and the multiplier.
struct FieldState {
  Vector interior;
  Vector trace;
  Real multiplier = 0.0;

  static FieldState zeros(const DofLayout& layout);
};

Eigen::VectorBlock<const Vector> tensor_coeffs(const FieldState& s, const DofLayout& l, int cell);
Eigen::VectorBlock<const Vector> velocity_coeffs(const FieldState& s, const DofLayout& l, int cell);
Eigen::VectorBlock<const Vector> pressure_coeffs(const FieldState& s, const DofLayout& l, int cell);
/// Velocity trace coefficients [x-comp | y-comp]; zero on boundary edges.
Vector uhat_coeffs(const FieldState& s, const DofLayout& l, int edge);
Eigen::VectorBlock<const Vector> phat_coeffs(const FieldState& s, const DofLayout& l, int edge);

// ---------------------------------------------------------------------------
// Quadrature data evaluated on a physical cell
// ---------------------------------------------------------------------------

/// Basis values at the quadrature points of one cell. Matrices are
/// (points x basis functions); derivatives are physical.
struct CellQuadrature {
  Eigen::MatrixX2d points;
  Vector weights;  // include the area scaling
  Matrix velocity, velocity_dx, velocity_dy;
  Matrix tensor, tensor_dx, tensor_dy;
  Matrix pressure;
};

/// Basis values at the quadrature points of one local edge of a cell. The
/// edge is parametrized from its low to its high vertex, so trace basis
/// values agree between the two neighbouring cells.
struct EdgeQuadrature {
  int edge = -1;
  bool boundary = false;
  Vec2 normal = Vec2::Zero();  // outward for the cell
  Real length = 0.0;
  Real tau = 0.0;
  Eigen::MatrixX2d points;
  Vector weights;  // include the length scaling
  Matrix velocity, tensor, pressure;
  Matrix trace;
};

/// Length scale h in the penalty tau = 1/h of s_h.
enum class PenaltyScaling { cell_diameter, edge_length };

/// Mesh, layout, viscosity and reference tabulations shared by every
/// element computation.
class Discretization {
 public:
  Discretization(const Mesh& mesh, int k, int m = -1, Real nu = 1.0,
                 PenaltyScaling penalty = PenaltyScaling::cell_diameter);

  const Mesh& mesh() const { return *mesh_; }
  const DofLayout& layout() const { return layout_; }
  Real nu() const { return nu_; }
  int k() const { return layout_.k; }
  int m() const { return layout_.m; }
  PenaltyScaling penalty() const { return penalty_; }

  const CellBasis<>& velocity_basis() const { return velocity_basis_; }
  const CellBasis<>& tensor_basis() const { return tensor_basis_; }
  const CellBasis<>& pressure_basis() const { return pressure_basis_; }
  const EdgeBasis<>& trace_basis() const { return trace_basis_; }

  /// Degree 3k+2 rule used by the bilinear and trilinear forms.
  CellQuadrature cell_quadrature(int cell) const { return evaluate_cell(cell, form_tables_); }
  /// High-order rule (degree >= max(2k+12, 14)) for loads and error norms.
  CellQuadrature accurate_cell_quadrature(int cell) const { return evaluate_cell(cell, accurate_tables_); }
  /// Degree 3k+1 rule on each of the three local edges.
  std::array<EdgeQuadrature, 3> edge_quadrature(int cell) const { return evaluate_edges(cell, edge_rule_); }
  /// Same as edge_quadrature with the high-order edge rule.
  std::array<EdgeQuadrature, 3> accurate_edge_quadrature(int cell) const {
    return evaluate_edges(cell, accurate_edge_rule_);
  }

 private:
  struct Tables {
    QuadRule<Real> rule;
    Matrix velocity, pressure, tensor;
    Eigen::MatrixXd velocity_dxi, velocity_deta, tensor_dxi, tensor_deta;
  };
  Tables tabulate(int degree) const;
  CellQuadrature evaluate_cell(int cell, const Tables& tables) const;
  std::array<EdgeQuadrature, 3> evaluate_edges(int cell, const QuadRule<Real>& rule) const;

  const Mesh* mesh_;
  DofLayout layout_;
  Real nu_;
  PenaltyScaling penalty_;
  CellBasis<> velocity_basis_, tensor_basis_, pressure_basis_;
  EdgeBasis<> trace_basis_;
  Tables form_tables_, accurate_tables_;
  QuadRule<Real> edge_rule_, accurate_edge_rule_;
};

// ---------------------------------------------------------------------------
// Element blocks
// ---------------------------------------------------------------------------

/// Element matrices of one cell.
///
/// Local velocity-pair ordering (size nU): [u | u^ on local edges 0,1,2];
/// local pressure-pair ordering (size nP): [p | p^ on local edges 0,1,2].
/// Matrices are indexed (test, trial):
///   A(G, L)  = a_h(L, G)             C(G, U) = c_h(U, G)
///   D(V, P)  = d_h(V, P)             S(V, U) = s_h(U, V)
///   B(V, U)  = b_h(W; U, V)          F(V)    = (f, v)
///   mean(P)  = (1, p)_T
/// Columns of u^ on boundary edges are assembled as well; the global systems
/// drop them since u^ = 0 there.
struct LocalBlocks {
  int cell = -1;
  std::array<int, 3> edges{};
  std::array<bool, 3> boundary{};
  Matrix A, C, D, S, B;
  Vector F, mean;

  int n_L() const { return static_cast<int>(A.rows()); }
  int n_U() const { return static_cast<int>(S.rows()); }
  int n_P() const { return static_cast<int>(D.cols()); }
};

/// Assembles all element blocks of `cell`. When `frozen` is null the
/// convective block B is zero (Stokes). `source` may be empty (f = 0).
LocalBlocks assemble_local(const Discretization& disc, int cell, const FieldState* frozen,
                           const VectorField& source);

/// Dense element system for the unknowns [L | U | P] (see LocalBlocks):
///
///   [ A    C        0 ] [L]   [ 0 ]
///   [ C^T  -S - B   D ] [U] = [-F ]
///   [ 0    D^T      0 ] [P]   [ 0 ]
///
/// The zero-mean multiplier column/row is carried separately by `mean`.
struct ElementSystem {
  Matrix matrix;
  Vector rhs;
};
ElementSystem element_system(const LocalBlocks& blocks);

/// Index of each local unknown [L | U | P] in the monolithic numbering
/// [interior cells | trace | multiplier]; -1 for u^ on boundary edges.
std::vector<int> monolithic_indices(const DofLayout& layout, const Mesh& mesh, int cell);

/// Coefficients of K_h V on every cell, blocked like the L part of the
/// interior vector: (K_h V, G)_T = -c_h(V, G) for all G in the tensor space.
Vector apply_Kh(const Discretization& disc, const FieldState& state);

/// K_h V on one cell.
Vector apply_Kh_cell(const Discretization& disc, const FieldState& state, int cell);

/// Local velocity-pair vector [u | u^_0 | u^_1 | u^_2] of a cell.
Vector local_velocity_pair(const Discretization& disc, const FieldState& state, int cell);
/// Local pressure-pair vector [p | p^_0 | p^_1 | p^_2] of a cell.
Vector local_pressure_pair(const Discretization& disc, const FieldState& state, int cell);

/// Mass matrix of the tensor space on one cell (four identical diagonal blocks).
Matrix tensor_mass(const Discretization& disc, int cell);

/// Forcing term of the manufactured test cases: example 1 is the smooth
/// polynomial flow, example 2 the hydrostatic case with u = 0.
Vec2 manufactured_source(int example_id, const Vec2& x, Real nu = 1.0);

}  // namespace dfhdg
