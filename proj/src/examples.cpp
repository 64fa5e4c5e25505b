// Closed forms of the two manufactured test cases.

#include <cmath>
#include <stdexcept>
#include <string>

#include "dfhdg/analysis.hpp"
#include "dfhdg/hdgforms.hpp"

namespace dfhdg {

namespace {
#include "example_source.inc"

void check_example(int example_id) {
  if (example_id != 1 && example_id != 2)
    throw std::invalid_argument("unknown example id " + std::to_string(example_id) + " (expected 1 or 2)");
}
}  // namespace

Vec2 manufactured_source(int example_id, const Vec2& p, Real nu) {
  check_example(example_id);
  const Real x = p.x(), y = p.y();
  if (example_id == 2) return {0.0, 1e6 * (3 * y * y - y + 1)};
  return {-nu * smooth_lap1(x, y) + smooth_conv1(x, y) + smooth_dpdx(x, y),
          -nu * smooth_lap2(x, y) + smooth_conv2(x, y) + smooth_dpdy(x, y)};
}

ExactSolution make_exact_solution(int example_id, Real nu) {
  check_example(example_id);
  ExactSolution ex;
  ex.example_id = example_id;
  ex.nu = nu;
  if (example_id == 1) {
    ex.velocity = [](const Vec2& p) { return Vec2(smooth_u1(p.x(), p.y()), smooth_u2(p.x(), p.y())); };
    ex.velocity_gradient = [](const Vec2& p) {
      Mat2 g;
      g << smooth_du1dx(p.x(), p.y()), smooth_du1dy(p.x(), p.y()), smooth_du2dx(p.x(), p.y()),
          smooth_du2dy(p.x(), p.y());
      return g;
    };
    ex.pressure = [](const Vec2& p) { return smooth_p(p.x(), p.y()); };
  } else {
    ex.velocity = [](const Vec2&) { return Vec2::Zero().eval(); };
    ex.velocity_gradient = [](const Vec2&) { return Mat2::Zero().eval(); };
    ex.pressure = [](const Vec2& p) {
      const Real y = p.y();
      return 1e6 * (y * y * y - y * y / 2 + y + 7.0 / 12.0);
    };
  }
  ex.pressure_mean = integrate_unit_square(ex.pressure);
  ex.norm_u = std::sqrt(integrate_unit_square([&](const Vec2& p) { return ex.velocity(p).squaredNorm(); }));
  ex.norm_L = nu * std::sqrt(integrate_unit_square(
                       [&](const Vec2& p) { return ex.velocity_gradient(p).squaredNorm(); }));
  ex.norm_p = std::sqrt(integrate_unit_square([&](const Vec2& p) {
    const Real d = ex.pressure(p) - ex.pressure_mean;
    return d * d;
  }));
  return ex;
}

}  // namespace dfhdg
