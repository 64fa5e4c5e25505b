#include <doctest.h>

#include <cmath>

#include "dfhdg/hdgforms.hpp"
#include "properties.hpp"
#include "reference_data.hpp"
#include "support.hpp"

using namespace dfhdg;
using namespace dfhdg::testing;

TEST_CASE("layout counts") {
  const Mesh mesh = build_uniform_mesh(1);
  for (int k = 1; k <= 3; ++k)
    for (int m : {k - 1, k}) {
      const DofLayout l = make_dof_layout(mesh, k, m);
      CHECK(l.n_L == 4 * dim_pk(m));
      CHECK(l.n_u == 2 * dim_pk(k));
      CHECK(l.n_p == dim_pk(k - 1));
      CHECK(l.n_uhat == 2 * (k + 1));
      CHECK(l.n_phat == k + 1);
      CHECK(l.num_uhat == l.n_uhat);  // one interior edge
      CHECK(l.num_trace == l.n_uhat + 5 * l.n_phat);
      CHECK(l.condensed_size() == l.num_trace + 1);
      CHECK(l.monolithic_size() == 2 * l.n_interior() + l.num_trace + 1);
    }
  const DofLayout l = make_dof_layout(mesh, 1);
  CHECK(l.m == 1);
  CHECK(l.condensed_size() == 15);
  CHECK_THROWS_AS(make_dof_layout(mesh, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_dof_layout(mesh, 2, 0), std::invalid_argument);
}

TEST_CASE("trace offsets partition the trace range") {
  const Mesh mesh = build_uniform_mesh(3);
  const DofLayout l = make_dof_layout(mesh, 2);
  std::vector<int> covered(l.num_trace, 0);
  for (int e = 0; e < l.num_edges; ++e) {
    if (mesh.is_boundary(e)) {
      CHECK(l.uhat_offset[e] == -1);
    } else {
      for (int i = 0; i < l.n_uhat; ++i) ++covered[l.uhat_offset[e] + i];
    }
    for (int i = 0; i < l.n_phat; ++i) ++covered[l.phat_offset[e] + i];
  }
  for (int c : covered) CHECK(c == 1);
  int prev = -1;
  for (int e = 0; e < l.num_edges; ++e)
    if (l.uhat_offset[e] >= 0) {
      CHECK(l.uhat_offset[e] > prev);
      prev = l.uhat_offset[e];
    }
  CHECK(l.multiplier_index() == l.num_trace);
}

TEST_CASE("a_h is a scaled SPD mass matrix") {
  const Mesh mesh = perturbed_mesh(2, 0.2, 1);
  const Real nu = 0.25;
  const Discretization disc(mesh, 2, -1, nu);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const LocalBlocks b = assemble_local(disc, c, nullptr, {});
    CHECK((b.A - b.A.transpose()).norm() < 1e-14 * b.A.norm());
    CHECK(b.A.llt().info() == Eigen::Success);
    const Vector identity = exact_tensor(disc, c, [](const Vec2&) { return Mat2::Identity().eval(); });
    CHECK(identity.dot(b.A * identity) == doctest::Approx(2 * mesh.cell_area(c) / nu).epsilon(1e-13));
  }
}

TEST_CASE("s_h is symmetric, semidefinite and vanishes exactly on matching pairs") {
  for (int k = 1; k <= 3; ++k)
    for (auto penalty : {PenaltyScaling::cell_diameter, PenaltyScaling::edge_length}) {
      const Mesh mesh = perturbed_mesh(2, 0.2, 2);
      const Discretization disc(mesh, k, -1, 1.0, penalty);
      for (int c = 0; c < mesh.num_cells(); ++c) {
        const LocalBlocks b = assemble_local(disc, c, nullptr, {});
        CHECK((b.S - b.S.transpose()).norm() < 1e-14 * b.S.norm());
      }
      const NullSpaceCheck s = s_null_space(disc, 7);
      CHECK(s.wrong_nullity == 0);
      CHECK(s.max_matching_residual < 1e-12);
      CHECK(s.min_mismatch_energy > 1e-8);
    }
}

TEST_CASE("b_h is antisymmetric for random states") {
  for (int k = 1; k <= 3; ++k) {
    const Mesh mesh = perturbed_mesh(2, 0.2, 3);
    const Discretization disc(mesh, k);
    CHECK(antisymmetry_defect(disc, 100, 17) <= 1e-12);
    std::mt19937 rng(4);
    const FieldState w = random_state(disc.layout(), rng);
    const LocalBlocks b = assemble_local(disc, 0, &w, {});
    CHECK((b.B + b.B.transpose()).norm() < 1e-12 * b.B.norm());
  }
}

TEST_CASE("Stokes blocks are zero without a frozen state and F is zero without a source") {
  const Mesh mesh = build_uniform_mesh(1);
  const Discretization disc(mesh, 2);
  const LocalBlocks b = assemble_local(disc, 0, nullptr, {});
  CHECK(b.B.norm() == 0.0);
  CHECK(b.F.norm() == 0.0);
  CHECK(b.mean.head(b.n_P() - 3 * disc.layout().n_phat).sum() != 0.0);
}

TEST_CASE("K_h matches a dense SVD solution of its defining identity") {
  for (int k = 1; k <= 3; ++k)
    for (int m : {k - 1, k}) {
      const Mesh mesh = perturbed_mesh(2, 0.2, 5);
      const Discretization disc(mesh, k, m);
      CHECK(kh_oracle_defect(disc, 5, 8) <= 1e-11);
    }
}

TEST_CASE("K_h of a continuous linear field is its gradient") {
  const Mesh mesh = perturbed_mesh(3, 0.2, 6);
  for (int k = 1; k <= 3; ++k) {
    const Discretization disc(mesh, k);
    for (int c = 0; c < mesh.num_cells(); ++c) {
      const LocalBlocks b = assemble_local(disc, c, nullptr, {});
      const Vector x = exact_velocity_pair(disc, c, [](const Vec2& p) { return p; });
      const Vector kv = (b.A * disc.nu()).llt().solve(-b.C * x);
      const Vector identity = exact_tensor(disc, c, [](const Vec2&) { return Mat2::Identity().eval(); });
      CHECK((kv - identity).norm() < 1e-11);
    }
    CHECK(apply_Kh(disc, FieldState::zeros(disc.layout())).norm() == 0.0);
  }
}

TEST_CASE("Stokes element equations are consistent with polynomial solutions") {
  for (int k = 1; k <= 3; ++k)
    for (Real nu : {1.0, 0.05}) CHECK(stokes_consistency_defect(k, 3, nu, 21 + k) <= 1e-11);
}

TEST_CASE("d_h telescopes to the boundary for H(div) velocities") {
  const Mesh mesh = build_uniform_mesh(1);
  const Discretization disc(mesh, 2);
  const DofLayout& l = disc.layout();
  const VectorField u = [](const Vec2& p) { return Vec2(p.x() * p.y() + 1, p.y() * p.y() - p.x()); };
  std::vector<Vector> rows(l.num_edges, Vector::Zero(l.n_phat));
  for (int c = 0; c < 2; ++c) {
    const LocalBlocks b = assemble_local(disc, c, nullptr, {});
    const Vector r = b.D.transpose() * exact_velocity_pair(disc, c, u);
    for (int i = 0; i < 3; ++i) rows[mesh.cell_edges(c)[i].edge] += r.segment(l.n_p + i * l.n_phat, l.n_phat);
  }
  const auto rule = make_quadrature(Domain::segment, 12);
  for (int e = 0; e < l.num_edges; ++e) {
    if (!mesh.is_boundary(e)) {
      CHECK(rows[e].norm() < 1e-13);
      continue;
    }
    // <u.n, q^> on the boundary edge, n outward
    const int c = mesh.edge_cells(e)[0];
    int local = 0;
    while (mesh.cell_edges(c)[local].edge != e) ++local;
    const Vec2 n = mesh.outward_normal(c, local);
    const EdgeMap em = mesh.edge_map(e);
    Vector expect = Vector::Zero(l.n_phat);
    for (Eigen::Index q = 0; q < rule.size(); ++q) {
      const Real t = rule.points(q, 0);
      expect += rule.weights(q) * em.length() * u(em.to_physical(t)).dot(n) * disc.trace_basis().values(t);
    }
    CHECK((rows[e] - expect).norm() < 1e-13);
  }
}

TEST_CASE("element system layout") {
  const Mesh mesh = build_uniform_mesh(1);
  const Discretization disc(mesh, 1);
  const LocalBlocks b = assemble_local(disc, 0, nullptr, [](const Vec2&) { return Vec2(1, 2); });
  const ElementSystem s = element_system(b);
  const int n = b.n_L() + b.n_U() + b.n_P();
  CHECK(s.matrix.rows() == n);
  CHECK(s.matrix.block(0, 0, b.n_L(), b.n_L()) == b.A);
  CHECK(s.matrix.block(b.n_L(), b.n_L(), b.n_U(), b.n_U()) == -b.S);
  CHECK(s.rhs.segment(b.n_L(), b.n_U()) == -b.F);
  const auto idx = monolithic_indices(disc.layout(), mesh, 0);
  CHECK(static_cast<int>(idx.size()) == n);
}

TEST_CASE("manufactured sources") {
  for (const auto& s : reference::kSmoothSource) {
    const Vec2 f = manufactured_source(1, Vec2(s.x, s.y));
    CHECK(f.x() == doctest::Approx(s.fx).epsilon(1e-12));
    CHECK(f.y() == doctest::Approx(s.fy).epsilon(1e-12));
  }
  const Vec2 centre = manufactured_source(1, Vec2(0.5, 0.5));
  CHECK(std::abs(centre.x()) < 1e-12);
  CHECK(std::abs(centre.y()) < 1e-12);
  for (Real y : {0.0, 0.3, 1.0}) {
    const Vec2 f = manufactured_source(2, Vec2(0.7, y));
    CHECK(f.x() == 0.0);
    CHECK(f.y() == doctest::Approx(1e6 * (3 * y * y - y + 1)));
  }
  CHECK_THROWS_AS(manufactured_source(3, Vec2(0, 0)), std::invalid_argument);
}
