#pragma once

// Helpers shared by the unit tests and the acceptance suite: projections of
// closed-form fields onto the discrete spaces and random states.

#include <functional>
#include <random>

#include "dfhdg/hdgforms.hpp"

namespace dfhdg::testing {

using TensorField = std::function<Mat2(const Vec2&)>;

/// Coefficients of the L2 projection of f onto the orthonormal basis of P_degree on a cell.
Vector project_cell(const Discretization& disc, int cell, int degree, const ScalarField& f);
/// Coefficients of the L2 projection of g onto P_k(E), parametrized low to high.
Vector project_edge(const Discretization& disc, int edge, const ScalarField& g);

/// State whose every component is the L2 projection of the given field:
/// L = nu grad u, u, p on cells; u^ on interior edges, p^ = -p on all edges.
/// The multiplier is zero.
FieldState interpolate_state(const Discretization& disc, const VectorField& u, const TensorField& grad_u,
                             const ScalarField& p);

/// Local velocity pair [u | u^_0 | u^_1 | u^_2] of the projections of u,
/// including the traces on boundary edges.
Vector exact_velocity_pair(const Discretization& disc, int cell, const VectorField& u);
/// Local pressure pair [p | p^_0 | p^_1 | p^_2] of the projections of p.
/// With d_h's +<v.n, p^> sign the trace approximates -p, so the edge parts are negated.
Vector exact_pressure_pair(const Discretization& disc, int cell, const ScalarField& p);
/// Local tensor coefficients of the projection of G.
Vector exact_tensor(const Discretization& disc, int cell, const TensorField& g);

/// Uniformly random coefficients in [-1, 1]; u^ stays zero on boundary edges.
FieldState random_state(const DofLayout& layout, std::mt19937& rng);
Vector random_vector(Eigen::Index n, std::mt19937& rng);

/// A mesh of the unit square with perturbed interior vertices.
Mesh perturbed_mesh(int n, Real amplitude, unsigned seed);

}  // namespace dfhdg::testing
