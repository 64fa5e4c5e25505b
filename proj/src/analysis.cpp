#include "dfhdg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dfhdg {

Real integrate_unit_square(const std::function<Real(const Vec2&)>& g, int degree) {
  const auto rule = make_quadrature(Domain::triangle, degree);
  const AffineMap lower = AffineMap::from_vertices({0, 0}, {1, 0}, {1, 1});
  const AffineMap upper = AffineMap::from_vertices({0, 0}, {1, 1}, {0, 1});
  Real sum = 0;
  for (const AffineMap* map : {&lower, &upper})
    for (Eigen::Index q = 0; q < rule.size(); ++q)
      sum += rule.weights(q) * std::abs(map->det) * g(map->to_physical(rule.points.row(q).transpose()));
  return sum;
}

ErrorNorms error_norms(const Discretization& disc, const FieldState& state, const ExactSolution& exact) {
  const DofLayout& l = disc.layout();
  const int dk = l.dim_velocity, dm = l.dim_tensor;
  Real eu = 0, eL = 0, ep = 0, p_mean = 0;
  // p_h is zero-mean up to solver precision; shift it anyway so that the
  // comparison does not depend on the constraint being exact.
  for (int c = 0; c < l.num_cells; ++c) {
    const CellQuadrature cq = disc.accurate_cell_quadrature(c);
    p_mean += cq.weights.dot(cq.pressure * pressure_coeffs(state, l, c));
  }
  for (int c = 0; c < l.num_cells; ++c) {
    const CellQuadrature cq = disc.accurate_cell_quadrature(c);
    const Vector uc = velocity_coeffs(state, l, c);
    const Vector Lc = tensor_coeffs(state, l, c);
    const Vector ux = cq.velocity * uc.head(dk), uy = cq.velocity * uc.tail(dk);
    const Vector ph = cq.pressure * pressure_coeffs(state, l, c);
    Matrix Lh(cq.points.rows(), 4);
    for (int ij = 0; ij < 4; ++ij) Lh.col(ij) = cq.tensor * Lc.segment(ij * dm, dm);
    for (Eigen::Index q = 0; q < cq.points.rows(); ++q) {
      const Vec2 x = cq.points.row(q).transpose();
      const Real w = cq.weights(q);
      eu += w * (exact.velocity(x) - Vec2(ux(q), uy(q))).squaredNorm();
      const Mat2 L = exact.nu * exact.velocity_gradient(x);
      Mat2 Lq;
      Lq << Lh(q, 0), Lh(q, 1), Lh(q, 2), Lh(q, 3);
      eL += w * (L - Lq).squaredNorm();
      const Real dp = (exact.pressure(x) - exact.pressure_mean) - (ph(q) - p_mean);
      ep += w * dp * dp;
    }
  }
  ErrorNorms e;
  e.abs_u = std::sqrt(eu);
  e.abs_L = std::sqrt(eL);
  e.abs_p = std::sqrt(ep);
  e.err_u = exact.norm_u > 0 ? e.abs_u / exact.norm_u : e.abs_u;
  e.err_L = exact.norm_L > 0 ? e.abs_L / exact.norm_L : e.abs_L;
  e.err_p = exact.norm_p > 0 ? e.abs_p / exact.norm_p : e.abs_p;
  return e;
}

DivergenceReport divergence_report(const Discretization& disc, const FieldState& state) {
  const DofLayout& l = disc.layout();
  const int dk = l.dim_velocity;
  DivergenceReport r;
  // Accumulated per edge: jump of u_h . n_E seen from both sides.
  std::vector<Vector> edge_normal_sum(l.num_edges);
  std::vector<Vector> edge_weights(l.num_edges);
  for (int c = 0; c < l.num_cells; ++c) {
    const Vector uc = velocity_coeffs(state, l, c);
    const CellQuadrature cq = disc.accurate_cell_quadrature(c);
    const Vector div = cq.velocity_dx * uc.head(dk) + cq.velocity_dy * uc.tail(dk);
    r.l1 += cq.weights.dot(div.cwiseAbs());
    r.max_cell_divergence = std::max(r.max_cell_divergence, div.cwiseAbs().maxCoeff());
    const auto edges = disc.accurate_edge_quadrature(c);
    for (const auto& eq : edges) {
      // outward normal flux; the two sides add up to the jump
      const Vector un = eq.normal.x() * (eq.velocity * uc.head(dk)) + eq.normal.y() * (eq.velocity * uc.tail(dk));
      if (edge_normal_sum[eq.edge].size() == 0) {
        edge_normal_sum[eq.edge] = un;
        edge_weights[eq.edge] = eq.weights;
      } else {
        edge_normal_sum[eq.edge] += un;
      }
    }
  }
  for (int e = 0; e < l.num_edges; ++e) {
    const Real jump = std::sqrt(edge_weights[e].dot(edge_normal_sum[e].cwiseAbs2()));
    r.max_normal_jump = std::max(r.max_normal_jump, jump);
  }
  return r;
}

Real divergence_l1(const Discretization& disc, const FieldState& state) {
  const DofLayout& l = disc.layout();
  const int dk = l.dim_velocity;
  Real sum = 0;
  for (int c = 0; c < l.num_cells; ++c) {
    const Vector uc = velocity_coeffs(state, l, c);
    const CellQuadrature cq = disc.accurate_cell_quadrature(c);
    const Vector div = cq.velocity_dx * uc.head(dk) + cq.velocity_dy * uc.tail(dk);
    sum += cq.weights.dot(div.cwiseAbs());
  }
  return sum;
}

Real convergence_rate(Real coarse, Real fine) {
  if (coarse == fine) return 0.0;
  return std::log2(coarse / fine);
}

bool is_doubling_sequence(const std::vector<int>& levels) {
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (levels[i] != 2 * levels[i - 1]) return false;
  return true;
}

std::vector<ConvergenceRow> rate_table(std::vector<ConvergenceRow> rows) {
  std::vector<int> levels;
  for (const auto& r : rows) levels.push_back(r.n);
  if (!is_doubling_sequence(levels)) throw std::invalid_argument("rate table needs n to double between rows");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i == 0) {
      rows[i].rate_u.reset();
      rows[i].rate_L.reset();
      rows[i].rate_p.reset();
      continue;
    }
    rows[i].rate_u = convergence_rate(rows[i - 1].err_u, rows[i].err_u);
    rows[i].rate_L = convergence_rate(rows[i - 1].err_L, rows[i].err_L);
    rows[i].rate_p = convergence_rate(rows[i - 1].err_p, rows[i].err_p);
  }
  return rows;
}

}  // namespace dfhdg
