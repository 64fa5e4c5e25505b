#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "dfhdg/hdgforms.hpp"

namespace dfhdg {

/// Closed-form solution of one of the two manufactured test cases on the
/// unit square, with reference norms.
struct ExactSolution {
  int example_id = 1;
  Real nu = 1.0;
  std::function<Vec2(const Vec2&)> velocity;
  std::function<Mat2(const Vec2&)> velocity_gradient;  // (i, j) = d u_i / d x_j
  std::function<Real(const Vec2&)> pressure;           // as printed, not shifted
  Real pressure_mean = 0.0;                            // subtract to get zero mean
  Real norm_u = 0.0;                                   // ||u||_0
  Real norm_L = 0.0;                                   // ||nu grad u||_0
  Real norm_p = 0.0;                                   // ||p - mean||_0

  Vec2 source(const Vec2& x) const { return manufactured_source(example_id, x, nu); }
};

/// example_id 1: smooth polynomial flow; 2: u = 0 with a large cubic pressure.
ExactSolution make_exact_solution(int example_id, Real nu = 1.0);

/// Integral over the unit square with a high-order rule on two triangles.
Real integrate_unit_square(const std::function<Real(const Vec2&)>& g, int degree = 30);

/// L2 errors of (u_h, L_h, p_h); each is relative to the exact norm, or
/// absolute when that norm vanishes (u = 0 in example 2).
struct ErrorNorms {
  Real err_u = 0.0, err_L = 0.0, err_p = 0.0;
  Real abs_u = 0.0, abs_L = 0.0, abs_p = 0.0;
};

/// Pressures are compared after shifting both to zero mean.
ErrorNorms error_norms(const Discretization& disc, const FieldState& state, const ExactSolution& exact);

/// Sum over cells of the integral of |div u_h|.
Real divergence_l1(const Discretization& disc, const FieldState& state);

struct DivergenceReport {
  Real l1 = 0.0;                // sum_T int_T |div u_h|
  Real max_cell_divergence = 0.0;  // max over quadrature points of |div u_h|
  Real max_normal_jump = 0.0;   // max over edges of ||[u_h . n]||_{0,E}; u_h . n on boundary edges
};
DivergenceReport divergence_report(const Discretization& disc, const FieldState& state);

/// One refinement level of a convergence study.
struct ConvergenceRow {
  int n = 0;
  Real h = 0.0;
  Real err_u = 0.0, err_L = 0.0, err_p = 0.0;
  std::optional<Real> rate_u, rate_L, rate_p;
  Real div_l1 = 0.0;
  int picard_iters = 0;
  bool converged = true;
};

/// log2(coarse / fine) for one halving of h.
Real convergence_rate(Real coarse, Real fine);

/// Attaches rates to every row after the first. Rows must be ordered by
/// doubling n; otherwise std::invalid_argument.
std::vector<ConvergenceRow> rate_table(std::vector<ConvergenceRow> rows);

/// True when every successive n doubles.
bool is_doubling_sequence(const std::vector<int>& levels);

}  // namespace dfhdg
