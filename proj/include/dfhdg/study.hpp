#pragma once

// Convergence study: one Picard solve per refinement level, error norms,
// rates and table emission.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dfhdg/analysis.hpp"
#include "dfhdg/solver.hpp"

namespace dfhdg {

enum class OutputFormat { csv, markdown };

struct StudyConfig {
  int example_id = 1;
  int k = 1;
  bool reduced_tensor = false;  // L_h in P_{k-1} instead of P_k
  std::vector<int> levels{4, 8, 16, 32, 64};
  Real nu = 1.0;
  Real tol = 1e-10;
  int max_iter = 50;
  SolveMode mode = SolveMode::condensed;
  OutputFormat format = OutputFormat::csv;
  std::string out_path;                  // empty: no file
  std::optional<std::string> mesh_file;  // Triangle basename; replaces levels with one run

  int m() const { return reduced_tensor ? k - 1 : k; }
};

/// Throws std::invalid_argument describing the first problem found.
void validate(const StudyConfig& config);

struct StudyResult {
  std::vector<ConvergenceRow> rows;
  bool rates = false;  // false when the levels do not double
  std::vector<std::string> warnings;
  bool all_converged() const;
};

/// Solves every level in order. Progress lines go to `log` when given.
/// Writes the table to config.out_path when it is not empty.
StudyResult run_study(const StudyConfig& config, std::ostream* log = nullptr);

/// Reads <base>.node and <base>.ele. A path ending in .node or .ele is
/// accepted as well.
Mesh read_triangle_files(const std::string& path);

/// Header n,h,err_u_rel,rate_u,err_L_rel,rate_L,err_p_rel,rate_p,div_l1,iters;
/// reals as %.4E, missing rates empty. Unconverged levels are listed in a
/// trailing '#' comment.
std::string format_csv(const std::vector<ConvergenceRow>& rows);
/// Markdown pipe table: errors and rates per level.
std::string format_markdown(const std::vector<ConvergenceRow>& rows, const StudyConfig& config);
std::string format_table(const StudyResult& result, const StudyConfig& config);

}  // namespace dfhdg
