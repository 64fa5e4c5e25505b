#include <doctest.h>

#include <cmath>
#include <random>

#include "dfhdg/analysis.hpp"
#include "dfhdg/solver.hpp"
#include "reference_data.hpp"
#include "support.hpp"

using namespace dfhdg;
using namespace dfhdg::testing;

TEST_CASE("exact solutions are divergence free with the documented pressure means") {
  std::mt19937 rng(1);
  std::uniform_real_distribution<Real> u(0, 1);
  for (int id : {1, 2}) {
    const ExactSolution ex = make_exact_solution(id);
    for (int i = 0; i < 100; ++i) CHECK(std::abs(ex.velocity_gradient(Vec2(u(rng), u(rng))).trace()) <= 1e-13);
    const Real shifted = integrate_unit_square([&](const Vec2& x) { return ex.pressure(x) - ex.pressure_mean; });
    CHECK(std::abs(shifted) <= 1e-12 * std::max(1.0, std::abs(ex.pressure_mean)));
  }
  CHECK(std::abs(make_exact_solution(1).pressure_mean) <= 1e-14);
  CHECK(make_exact_solution(2).pressure_mean == doctest::Approx(1e6 * 7.0 / 6.0).epsilon(1e-13));
  CHECK(make_exact_solution(2).norm_u == 0.0);
  CHECK_THROWS_AS(make_exact_solution(4), std::invalid_argument);
}

TEST_CASE("exact gradient matches finite differences of the velocity") {
  const ExactSolution ex = make_exact_solution(1);
  const Vec2 x(0.3, 0.7);
  const Real h = 1e-6;
  const Vec2 dx = (ex.velocity(x + Vec2(h, 0)) - ex.velocity(x - Vec2(h, 0))) / (2 * h);
  const Vec2 dy = (ex.velocity(x + Vec2(0, h)) - ex.velocity(x - Vec2(0, h))) / (2 * h);
  const Mat2 g = ex.velocity_gradient(x);
  CHECK((g.col(0) - dx).norm() < 1e-8);
  CHECK((g.col(1) - dy).norm() < 1e-8);
}

TEST_CASE("error norms vanish on interpolated polynomial fields") {
  const Mesh mesh = perturbed_mesh(3, 0.2, 2);
  const Discretization disc(mesh, 2);
  ExactSolution ex;
  ex.velocity = [](const Vec2& x) { return Vec2(x.x() * x.x() + x.y(), x.x() * x.y()); };
  ex.velocity_gradient = [](const Vec2& x) {
    Mat2 g;
    g << 2 * x.x(), 1, x.y(), x.x();
    return g;
  };
  ex.pressure = [](const Vec2& x) { return x.x() - 0.5; };
  ex.norm_u = std::sqrt(integrate_unit_square([&](const Vec2& x) { return ex.velocity(x).squaredNorm(); }));
  ex.norm_L = std::sqrt(integrate_unit_square([&](const Vec2& x) { return ex.velocity_gradient(x).squaredNorm(); }));
  ex.norm_p = std::sqrt(1.0 / 12.0);
  const FieldState s = interpolate_state(disc, ex.velocity, ex.velocity_gradient, ex.pressure);
  const ErrorNorms e = error_norms(disc, s, ex);
  CHECK(e.err_u <= 1e-10);
  CHECK(e.err_L <= 1e-10);
  CHECK(e.err_p <= 1e-10);
}

TEST_CASE("pressure errors ignore constants") {
  const Mesh mesh = build_uniform_mesh(2);
  const Discretization disc(mesh, 2);
  ExactSolution ex = make_exact_solution(2);
  const FieldState a = interpolate_state(disc, ex.velocity, ex.velocity_gradient, ex.pressure);
  const FieldState b = interpolate_state(disc, ex.velocity, ex.velocity_gradient,
                                         [&](const Vec2& x) { return ex.pressure(x) + 123.0; });
  const ErrorNorms ea = error_norms(disc, a, ex), eb = error_norms(disc, b, ex);
  CHECK(ea.abs_u == 0.0);
  CHECK(ea.err_p > 0);
  CHECK(eb.err_p == doctest::Approx(ea.err_p).epsilon(1e-10));
}

TEST_CASE("divergence measure") {
  const Mesh mesh = build_uniform_mesh(4);
  const Discretization disc(mesh, 1);
  CHECK(divergence_l1(disc, FieldState::zeros(disc.layout())) == 0.0);
  const FieldState s =
      interpolate_state(disc, [](const Vec2& x) { return Vec2(x.x(), 0); },
                        [](const Vec2&) { return Mat2{{1, 0}, {0, 0}}; }, [](const Vec2&) { return 0.0; });
  CHECK(divergence_l1(disc, s) == doctest::Approx(1.0).epsilon(1e-13));
  const DivergenceReport r = divergence_report(disc, s);
  CHECK(r.max_cell_divergence == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(r.max_normal_jump > 0);  // u . n = x on the boundary x = 1
}

TEST_CASE("converged smooth solves are divergence free") {
  const Mesh mesh = build_uniform_mesh(8);
  for (int k = 1; k <= 3; ++k) {
    const Discretization disc(mesh, k);
    const PicardResult r = picard_solve(disc, [](const Vec2& x) { return manufactured_source(1, x); });
    const DivergenceReport d = divergence_report(disc, r.state);
    CHECK(d.l1 < 1e-10);
    const Real scale = norm_V(disc, r.state);
    CHECK(d.max_cell_divergence / scale < 1e-10);
    CHECK(d.max_normal_jump / scale < 1e-10);
  }
}

TEST_CASE("hydrostatic pressure error at k=2, n=20") {
  const Mesh mesh = build_uniform_mesh(20);
  const Discretization disc(mesh, 2);
  const PicardResult r = picard_solve(disc, [](const Vec2& x) { return manufactured_source(2, x); });
  const ErrorNorms e = error_norms(disc, r.state, make_exact_solution(2));
  CHECK(e.err_p == doctest::Approx(reference::kHydrostaticPressure[1][1]).epsilon(0.05));
}

TEST_CASE("convergence rates") {
  CHECK(convergence_rate(4.5065E-02, 1.1561E-02) == doctest::Approx(1.96).epsilon(0.003));
  CHECK(convergence_rate(0.3, 0.3) == 0.0);
  CHECK(convergence_rate(1.8531E-03, 4.6392E-04) == doctest::Approx(2.00).epsilon(0.003));

  std::vector<ConvergenceRow> rows(3);
  rows[0].n = 8, rows[1].n = 16, rows[2].n = 32;
  rows[0].err_u = 4.5065E-02, rows[1].err_u = 1.1561E-02, rows[2].err_u = 2.9109E-03;
  rows[0].err_L = rows[1].err_L = rows[2].err_L = 1.0;
  rows[0].err_p = rows[1].err_p = rows[2].err_p = 1.0;
  const auto rated = rate_table(rows);
  CHECK_FALSE(rated[0].rate_u.has_value());
  REQUIRE(rated[1].rate_u.has_value());
  CHECK(*rated[1].rate_u == doctest::Approx(1.96).epsilon(0.003));
  CHECK(*rated[2].rate_L == 0.0);

  rows[2].n = 48;
  CHECK_THROWS_AS(rate_table(rows), std::invalid_argument);
  CHECK(is_doubling_sequence({4, 8, 16}));
  CHECK_FALSE(is_doubling_sequence({4, 6}));
}
