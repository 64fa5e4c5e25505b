#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "dfhdg/hdgforms.hpp"

namespace dfhdg {

enum class SolveMode { monolithic, condensed };

using SparseMatrix = Eigen::SparseMatrix<Real>;

/// Sparse factorization failure, with the statistics of the offending matrix.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, long dim, long nnz)
      : std::runtime_error(what + " (dim " + std::to_string(dim) + ", nnz " + std::to_string(nnz) + ")"),
        dim_(dim),
        nnz_(nnz) {}
  long dim() const { return dim_; }
  long nnz() const { return nnz_; }

 private:
  long dim_;
  long nnz_;
};

/// Assembled global system.
///
/// Monolithic unknowns: [interior (L, u, p) of every cell | u^ | p^ | multiplier].
/// Condensed unknowns:  [u^ | p^ | multiplier]; the interior unknowns of cell T
/// are recovered as  x_I = R_T.col(0) - R_T.middleCols(1, nT) x_T - R_T.col(nT+1) lambda.
struct GlobalSystem {
  SolveMode mode = SolveMode::condensed;
  SparseMatrix matrix;
  Vector rhs;
  std::vector<Matrix> recovery;  // condensed mode only, one per cell

  Eigen::Index dimension() const { return matrix.rows(); }
};

/// Assembles the Oseen system linearized at `frozen` (Stokes when null).
GlobalSystem assemble_global(const Discretization& disc, const FieldState* frozen, const VectorField& source,
                             SolveMode mode);

/// Reusable sparse LU factorization; the symbolic analysis is kept as long as
/// the sparsity pattern does not change.
class LinearSolver {
 public:
  LinearSolver();
  ~LinearSolver();
  LinearSolver(LinearSolver&&) noexcept;
  LinearSolver& operator=(LinearSolver&&) noexcept;

  /// Solves the system and returns the full field state. Throws SolverError
  /// when the factorization fails or the relative residual exceeds 1e-10.
  FieldState solve(const Discretization& disc, const GlobalSystem& system);

  /// Relative residual ||Ax - b|| / ||b|| of the last solve (0 when b = 0).
  Real last_residual() const { return last_residual_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  Real last_residual_ = 0.0;
};

/// One-shot solve of an assembled system.
FieldState solve_linear(const Discretization& disc, const GlobalSystem& system);

/// ||V||_V^2 = ||K_h V||_0^2 + ||tau^1/2 (v - v^)||^2 over all cell boundaries.
Real norm_V(const Discretization& disc, const FieldState& state);
/// ||Q||_Q^2 = ||q||_0^2 + ||tau^-1/2 (q - q^)||^2 over all cell boundaries.
Real norm_Q(const Discretization& disc, const FieldState& state);

/// Velocity-only difference a - b (pressures and tensor zeroed).
FieldState velocity_difference(const FieldState& a, const FieldState& b, const DofLayout& layout);

/// Relative residual of the nonlinear discrete equations at `state`,
/// measured against every test function (the multiplier row included).
Real nonlinear_residual(const Discretization& disc, const FieldState& state, const VectorField& source);

/// (f, u_h).
Real load_pairing(const Discretization& disc, const FieldState& state, const VectorField& source);

struct PicardOptions {
  Real tol = 1e-10;
  int max_iter = 50;
  SolveMode mode = SolveMode::condensed;
  bool stokes_initial_guess = true;  // false: start from the zero state
  // Also stop once the relative nonlinear residual drops to this level
  // (0 disables the test).
  Real residual_floor = 1e-12;
};

struct PicardReport {
  int iterations = 0;
  std::vector<Real> increments;  // ||U^{n+1} - U^n||_V per iteration
  Real residual = 0.0;           // nonlinear residual of the returned state
  bool converged = false;
  bool residual_stop = false;    // stopped by the residual floor, not the increment
};

struct PicardResult {
  FieldState state;
  PicardReport report;
};

/// Fixed-point iteration: each step solves the Oseen system with the
/// convecting field frozen at the previous iterate, until the increment
/// ||U^{n+1} - U^n||_V drops below tol or the residual floor is reached.
PicardResult picard_solve(const Discretization& disc, const VectorField& source, const PicardOptions& options = {});

}  // namespace dfhdg
