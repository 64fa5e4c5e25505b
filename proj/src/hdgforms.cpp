#include "dfhdg/hdgforms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dfhdg {

DofLayout make_dof_layout(const Mesh& mesh, int k, int m) {
  if (k < 1) throw std::invalid_argument("velocity degree k must be >= 1");
  if (m < 0) m = k;
  if (m != k && m != k - 1) throw std::invalid_argument("tensor degree m must be k or k-1");
  DofLayout l;
  l.k = k;
  l.m = m;
  l.dim_velocity = dim_pk(k);
  l.dim_tensor = dim_pk(m);
  l.dim_pressure = dim_pk(k - 1);
  l.dim_edge = k + 1;
  l.n_L = 4 * l.dim_tensor;
  l.n_u = 2 * l.dim_velocity;
  l.n_p = l.dim_pressure;
  l.n_uhat = 2 * l.dim_edge;
  l.n_phat = l.dim_edge;
  l.num_cells = mesh.num_cells();
  l.num_edges = mesh.num_edges();
  l.uhat_offset.assign(l.num_edges, -1);
  l.phat_offset.assign(l.num_edges, -1);
  int next = 0;
  for (int e = 0; e < l.num_edges; ++e)
    if (!mesh.is_boundary(e)) {
      l.uhat_offset[e] = next;
      next += l.n_uhat;
    }
  l.num_uhat = next;
  for (int e = 0; e < l.num_edges; ++e) {
    l.phat_offset[e] = next;
    next += l.n_phat;
  }
  l.num_trace = next;
  return l;
}

FieldState FieldState::zeros(const DofLayout& layout) {
  FieldState s;
  s.interior = Vector::Zero(layout.num_interior());
  s.trace = Vector::Zero(layout.num_trace);
  return s;
}

Eigen::VectorBlock<const Vector> tensor_coeffs(const FieldState& s, const DofLayout& l, int cell) {
  return s.interior.segment(l.interior_offset(cell), l.n_L);
}

Eigen::VectorBlock<const Vector> velocity_coeffs(const FieldState& s, const DofLayout& l, int cell) {
  return s.interior.segment(l.interior_offset(cell) + l.n_L, l.n_u);
}

Eigen::VectorBlock<const Vector> pressure_coeffs(const FieldState& s, const DofLayout& l, int cell) {
  return s.interior.segment(l.interior_offset(cell) + l.n_L + l.n_u, l.n_p);
}

Vector uhat_coeffs(const FieldState& s, const DofLayout& l, int edge) {
  if (l.uhat_offset[edge] < 0) return Vector::Zero(l.n_uhat);
  return s.trace.segment(l.uhat_offset[edge], l.n_uhat);
}

Eigen::VectorBlock<const Vector> phat_coeffs(const FieldState& s, const DofLayout& l, int edge) {
  return s.trace.segment(l.phat_offset[edge], l.n_phat);
}

// ---------------------------------------------------------------------------

Discretization::Discretization(const Mesh& mesh, int k, int m, Real nu, PenaltyScaling penalty)
    : mesh_(&mesh),
      layout_(make_dof_layout(mesh, k, m)),
      nu_(nu),
      penalty_(penalty),
      velocity_basis_(layout_.k, BasisKind::orthonormal),
      tensor_basis_(layout_.m, BasisKind::orthonormal),
      pressure_basis_(layout_.k - 1, BasisKind::orthonormal),
      trace_basis_(layout_.k) {
  if (!(nu > 0)) throw std::invalid_argument("viscosity must be positive");
  const int accurate = std::max(2 * k + 12, 14);
  form_tables_ = tabulate(3 * k + 2);
  accurate_tables_ = tabulate(accurate);
  edge_rule_ = make_quadrature(Domain::segment, 3 * k + 1);
  accurate_edge_rule_ = make_quadrature(Domain::segment, accurate);
}

Discretization::Tables Discretization::tabulate(int degree) const {
  Tables t;
  t.rule = make_quadrature(Domain::triangle, degree);
  const auto nq = t.rule.size();
  t.velocity.resize(nq, velocity_basis_.dim());
  t.velocity_dxi.resize(nq, velocity_basis_.dim());
  t.velocity_deta.resize(nq, velocity_basis_.dim());
  t.tensor.resize(nq, tensor_basis_.dim());
  t.tensor_dxi.resize(nq, tensor_basis_.dim());
  t.tensor_deta.resize(nq, tensor_basis_.dim());
  t.pressure.resize(nq, pressure_basis_.dim());
  for (Eigen::Index q = 0; q < nq; ++q) {
    const Vec2 xi = t.rule.points.row(q).transpose();
    t.velocity.row(q) = velocity_basis_.values(xi).transpose();
    const auto gv = velocity_basis_.gradients(xi);
    t.velocity_dxi.row(q) = gv.col(0).transpose();
    t.velocity_deta.row(q) = gv.col(1).transpose();
    t.tensor.row(q) = tensor_basis_.values(xi).transpose();
    const auto gt = tensor_basis_.gradients(xi);
    t.tensor_dxi.row(q) = gt.col(0).transpose();
    t.tensor_deta.row(q) = gt.col(1).transpose();
    t.pressure.row(q) = pressure_basis_.values(xi).transpose();
  }
  return t;
}

CellQuadrature Discretization::evaluate_cell(int cell, const Tables& t) const {
  const AffineMap map = mesh_->cell_map(cell);
  const Mat2& inv = map.inverse;  // d(xi_a)/d(x_b) = inv(a, b)
  CellQuadrature cq;
  const auto nq = t.rule.size();
  cq.points.resize(nq, 2);
  for (Eigen::Index q = 0; q < nq; ++q)
    cq.points.row(q) = map.to_physical(t.rule.points.row(q).transpose()).transpose();
  cq.weights = t.rule.weights * std::abs(map.det);
  cq.velocity = t.velocity;
  cq.velocity_dx = t.velocity_dxi * inv(0, 0) + t.velocity_deta * inv(1, 0);
  cq.velocity_dy = t.velocity_dxi * inv(0, 1) + t.velocity_deta * inv(1, 1);
  cq.tensor = t.tensor;
  cq.tensor_dx = t.tensor_dxi * inv(0, 0) + t.tensor_deta * inv(1, 0);
  cq.tensor_dy = t.tensor_dxi * inv(0, 1) + t.tensor_deta * inv(1, 1);
  cq.pressure = t.pressure;
  return cq;
}

std::array<EdgeQuadrature, 3> Discretization::evaluate_edges(int cell, const QuadRule<Real>& rule) const {
  const AffineMap map = mesh_->cell_map(cell);
  std::array<EdgeQuadrature, 3> out;
  const auto nq = rule.size();
  for (int i = 0; i < 3; ++i) {
    const int e = mesh_->cell_edges(cell)[i].edge;
    const EdgeMap em = mesh_->edge_map(e);
    EdgeQuadrature& eq = out[i];
    eq.edge = e;
    eq.boundary = mesh_->is_boundary(e);
    eq.normal = mesh_->outward_normal(cell, i);
    eq.length = mesh_->edge_length(e);
    eq.tau = penalty_ == PenaltyScaling::edge_length ? 1.0 / eq.length : 1.0 / mesh_->cell_diameter(cell);
    eq.points.resize(nq, 2);
    eq.weights = rule.weights * eq.length;
    eq.velocity.resize(nq, velocity_basis_.dim());
    eq.tensor.resize(nq, tensor_basis_.dim());
    eq.pressure.resize(nq, pressure_basis_.dim());
    eq.trace.resize(nq, trace_basis_.dim());
    for (Eigen::Index q = 0; q < nq; ++q) {
      const Real t = rule.points(q, 0);
      const Vec2 x = em.to_physical(t);
      const Vec2 xi = map.to_reference(x);
      eq.points.row(q) = x.transpose();
      eq.velocity.row(q) = velocity_basis_.values(xi).transpose();
      eq.tensor.row(q) = tensor_basis_.values(xi).transpose();
      eq.pressure.row(q) = pressure_basis_.values(xi).transpose();
      eq.trace.row(q) = trace_basis_.values(t).transpose();
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

LocalBlocks assemble_local(const Discretization& disc, int cell, const FieldState* frozen,
                           const VectorField& source) {
  const DofLayout& l = disc.layout();
  const Mesh& mesh = disc.mesh();
  const Real nu = disc.nu();
  const int dk = l.dim_velocity, dm = l.dim_tensor, dp = l.dim_pressure, de = l.dim_edge;
  const int nU = l.n_u + 3 * l.n_uhat;
  const int nP = l.n_p + 3 * l.n_phat;
  auto uhat_col = [&](int i, int c) { return l.n_u + i * l.n_uhat + c * de; };
  auto phat_col = [&](int i) { return l.n_p + i * l.n_phat; };

  LocalBlocks b;
  b.cell = cell;
  for (int i = 0; i < 3; ++i) {
    b.edges[i] = mesh.cell_edges(cell)[i].edge;
    b.boundary[i] = mesh.is_boundary(b.edges[i]);
  }
  b.A = Matrix::Zero(l.n_L, l.n_L);
  b.C = Matrix::Zero(l.n_L, nU);
  b.D = Matrix::Zero(nU, nP);
  b.S = Matrix::Zero(nU, nU);
  b.B = Matrix::Zero(nU, nU);
  b.F = Vector::Zero(nU);
  b.mean = Vector::Zero(nP);

  const CellQuadrature cq = disc.cell_quadrature(cell);
  const auto w = cq.weights.asDiagonal();

  const Matrix mass_tensor = cq.tensor.transpose() * w * cq.tensor;
  for (int ij = 0; ij < 4; ++ij) b.A.block(ij * dm, ij * dm, dm, dm) = mass_tensor / nu;

  // (u, div G): G = E_ij theta, u = e_i psi.
  const Matrix theta_dx_psi = cq.tensor_dx.transpose() * w * cq.velocity;
  const Matrix theta_dy_psi = cq.tensor_dy.transpose() * w * cq.velocity;
  for (int i = 0; i < 2; ++i) {
    b.C.block((2 * i + 0) * dm, i * dk, dm, dk) += theta_dx_psi;
    b.C.block((2 * i + 1) * dm, i * dk, dm, dk) += theta_dy_psi;
  }

  // (div v, p): v = e_c psi.
  b.D.block(0, 0, dk, dp) = cq.velocity_dx.transpose() * w * cq.pressure;
  b.D.block(dk, 0, dk, dp) = cq.velocity_dy.transpose() * w * cq.pressure;
  b.mean.head(dp) = cq.pressure.transpose() * cq.weights;

  if (frozen) {
    // 1/2 (v (x) w, grad u) - 1/2 (u (x) w, grad v), same for both components.
    const Vector wc = velocity_coeffs(*frozen, l, cell);
    const Vector wx = cq.velocity * wc.head(dk);
    const Vector wy = cq.velocity * wc.tail(dk);
    const Matrix w_grad = wx.asDiagonal() * cq.velocity_dx + wy.asDiagonal() * cq.velocity_dy;
    const Matrix t1 = 0.5 * cq.velocity.transpose() * w * w_grad;
    const Matrix skew = t1 - t1.transpose();
    b.B.block(0, 0, dk, dk) += skew;
    b.B.block(dk, dk, dk, dk) += skew;
  }

  const auto edges = disc.edge_quadrature(cell);
  for (int i = 0; i < 3; ++i) {
    const EdgeQuadrature& eq = edges[i];
    const auto ew = eq.weights.asDiagonal();
    const Vec2 n = eq.normal;
    const Matrix theta_chi = eq.tensor.transpose() * ew * eq.trace;
    const Matrix psi_chi = eq.velocity.transpose() * ew * eq.trace;
    const Matrix psi_psi = eq.velocity.transpose() * ew * eq.velocity;
    const Matrix chi_chi = eq.trace.transpose() * ew * eq.trace;

    for (int c = 0; c < 2; ++c) {
      // -<u^, G n>: G = E_cj theta, u^ = e_c chi.
      b.C.block((2 * c + 0) * dm, uhat_col(i, c), dm, de) -= n.x() * theta_chi;
      b.C.block((2 * c + 1) * dm, uhat_col(i, c), dm, de) -= n.y() * theta_chi;
      // <v.n, p^>
      b.D.block(c * dk, phat_col(i), dk, de) += n(c) * psi_chi;
      // nu tau <u - u^, v - v^>
      const Real s = nu * eq.tau;
      b.S.block(c * dk, c * dk, dk, dk) += s * psi_psi;
      b.S.block(c * dk, uhat_col(i, c), dk, de) -= s * psi_chi;
      b.S.block(uhat_col(i, c), c * dk, de, dk) -= s * psi_chi.transpose();
      b.S.block(uhat_col(i, c), uhat_col(i, c), de, de) += s * chi_chi;
    }

    if (frozen) {
      const Vector what = uhat_coeffs(*frozen, l, eq.edge);
      const Vector wn = eq.trace * (n.x() * what.head(de) + n.y() * what.tail(de));
      // +1/2 <(w^.n) u^, v> and its antisymmetric partner -1/2 <(w^.n) v^, u>.
      const Matrix flux = 0.5 * eq.velocity.transpose() * (eq.weights.cwiseProduct(wn)).asDiagonal() * eq.trace;
      for (int c = 0; c < 2; ++c) {
        b.B.block(c * dk, uhat_col(i, c), dk, de) += flux;
        b.B.block(uhat_col(i, c), c * dk, de, dk) -= flux.transpose();
      }
    }
  }

  if (source) {
    const CellQuadrature acc = disc.accurate_cell_quadrature(cell);
    Vector fx(acc.points.rows()), fy(acc.points.rows());
    for (Eigen::Index q = 0; q < acc.points.rows(); ++q) {
      const Vec2 f = source(acc.points.row(q).transpose());
      fx(q) = f.x() * acc.weights(q);
      fy(q) = f.y() * acc.weights(q);
    }
    b.F.head(dk) = acc.velocity.transpose() * fx;
    b.F.segment(dk, dk) = acc.velocity.transpose() * fy;
  }
  return b;
}

ElementSystem element_system(const LocalBlocks& b) {
  const int nL = b.n_L(), nU = b.n_U(), nP = b.n_P();
  ElementSystem sys;
  sys.matrix = Matrix::Zero(nL + nU + nP, nL + nU + nP);
  sys.matrix.block(0, 0, nL, nL) = b.A;
  sys.matrix.block(0, nL, nL, nU) = b.C;
  sys.matrix.block(nL, 0, nU, nL) = b.C.transpose();
  sys.matrix.block(nL, nL, nU, nU) = -b.S - b.B;
  sys.matrix.block(nL, nL + nU, nU, nP) = b.D;
  sys.matrix.block(nL + nU, nL, nP, nU) = b.D.transpose();
  sys.rhs = Vector::Zero(nL + nU + nP);
  sys.rhs.segment(nL, nU) = -b.F;
  return sys;
}

std::vector<int> monolithic_indices(const DofLayout& l, const Mesh& mesh, int cell) {
  const int nU = l.n_u + 3 * l.n_uhat;
  const int nP = l.n_p + 3 * l.n_phat;
  std::vector<int> idx(l.n_L + nU + nP, -1);
  const int base = l.interior_offset(cell);
  const int trace_base = l.num_interior();
  int pos = 0;
  for (int j = 0; j < l.n_L; ++j) idx[pos++] = base + j;
  for (int j = 0; j < l.n_u; ++j) idx[pos++] = base + l.n_L + j;
  for (int i = 0; i < 3; ++i) {
    const int off = l.uhat_offset[mesh.cell_edges(cell)[i].edge];
    for (int j = 0; j < l.n_uhat; ++j) idx[pos++] = off < 0 ? -1 : trace_base + off + j;
  }
  for (int j = 0; j < l.n_p; ++j) idx[pos++] = base + l.n_L + l.n_u + j;
  for (int i = 0; i < 3; ++i) {
    const int off = l.phat_offset[mesh.cell_edges(cell)[i].edge];
    for (int j = 0; j < l.n_phat; ++j) idx[pos++] = trace_base + off + j;
  }
  return idx;
}

Vector local_velocity_pair(const Discretization& disc, const FieldState& state, int cell) {
  const DofLayout& l = disc.layout();
  Vector x(l.n_u + 3 * l.n_uhat);
  x.head(l.n_u) = velocity_coeffs(state, l, cell);
  for (int i = 0; i < 3; ++i)
    x.segment(l.n_u + i * l.n_uhat, l.n_uhat) = uhat_coeffs(state, l, disc.mesh().cell_edges(cell)[i].edge);
  return x;
}

Vector local_pressure_pair(const Discretization& disc, const FieldState& state, int cell) {
  const DofLayout& l = disc.layout();
  Vector x(l.n_p + 3 * l.n_phat);
  x.head(l.n_p) = pressure_coeffs(state, l, cell);
  for (int i = 0; i < 3; ++i)
    x.segment(l.n_p + i * l.n_phat, l.n_phat) = phat_coeffs(state, l, disc.mesh().cell_edges(cell)[i].edge);
  return x;
}

Matrix tensor_mass(const Discretization& disc, int cell) {
  const DofLayout& l = disc.layout();
  const CellQuadrature cq = disc.cell_quadrature(cell);
  const Matrix block = cq.tensor.transpose() * cq.weights.asDiagonal() * cq.tensor;
  Matrix mass = Matrix::Zero(l.n_L, l.n_L);
  for (int ij = 0; ij < 4; ++ij) mass.block(ij * l.dim_tensor, ij * l.dim_tensor, l.dim_tensor, l.dim_tensor) = block;
  return mass;
}

Vector apply_Kh_cell(const Discretization& disc, const FieldState& state, int cell) {
  const LocalBlocks b = assemble_local(disc, cell, nullptr, {});
  const Matrix mass = b.A * disc.nu();
  return -mass.llt().solve(b.C * local_velocity_pair(disc, state, cell));
}

Vector apply_Kh(const Discretization& disc, const FieldState& state) {
  const DofLayout& l = disc.layout();
  Vector out(l.num_cells * l.n_L);
  for (int c = 0; c < l.num_cells; ++c) out.segment(c * l.n_L, l.n_L) = apply_Kh_cell(disc, state, c);
  return out;
}

}  // namespace dfhdg
