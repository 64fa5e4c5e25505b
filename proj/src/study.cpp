#include "dfhdg/study.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dfhdg {

namespace {

std::string sci(Real v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4E", v);
  return buf;
}

std::string fixed2(Real v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mesh file '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

void validate(const StudyConfig& c) {
  if (c.example_id != 1 && c.example_id != 2) throw std::invalid_argument("example must be 1 or 2");
  if (c.k < 1 || c.k > 3) throw std::invalid_argument("k must be 1, 2 or 3");
  if (!(c.nu > 0) || !std::isfinite(c.nu)) throw std::invalid_argument("viscosity must be positive and finite");
  if (!(c.tol > 0)) throw std::invalid_argument("Picard tolerance must be positive");
  if (c.max_iter < 1) throw std::invalid_argument("max-iter must be >= 1");
  if (c.mesh_file) return;
  if (c.levels.empty()) throw std::invalid_argument("at least one refinement level is required");
  for (std::size_t i = 0; i < c.levels.size(); ++i) {
    if (c.levels[i] < 1) throw std::invalid_argument("refinement levels must be positive");
    if (i > 0 && c.levels[i] <= c.levels[i - 1])
      throw std::invalid_argument("refinement levels must be strictly increasing");
  }
}

bool StudyResult::all_converged() const {
  for (const auto& r : rows)
    if (!r.converged) return false;
  return true;
}

Mesh read_triangle_files(const std::string& path) {
  std::string base = path;
  if (ends_with(base, ".node") || ends_with(base, ".ele")) base = base.substr(0, base.rfind('.'));
  return import_triangle_mesh(read_file(base + ".node"), read_file(base + ".ele"));
}

StudyResult run_study(const StudyConfig& config, std::ostream* log) {
  validate(config);
  StudyResult result;
  const ExactSolution exact = make_exact_solution(config.example_id, config.nu);
  const VectorField source = [&exact](const Vec2& x) { return exact.source(x); };

  std::vector<int> levels = config.levels;
  if (config.mesh_file) levels = {0};
  for (int n : levels) {
    const auto start = std::chrono::steady_clock::now();
    const Mesh mesh = config.mesh_file ? read_triangle_files(*config.mesh_file) : build_uniform_mesh(n);
    const Discretization disc(mesh, config.k, config.m(), config.nu);
    PicardOptions options;
    options.tol = config.tol;
    options.max_iter = config.max_iter;
    options.mode = config.mode;
    const PicardResult solved = picard_solve(disc, source, options);
    const ErrorNorms err = error_norms(disc, solved.state, exact);

    ConvergenceRow row;
    row.h = mesh.max_cell_diameter();
    row.n = config.mesh_file ? static_cast<int>(std::lround(std::sqrt(2.0) / row.h)) : n;
    row.err_u = err.err_u;
    row.err_L = err.err_L;
    row.err_p = err.err_p;
    row.div_l1 = divergence_l1(disc, solved.state);
    row.picard_iters = solved.report.iterations;
    row.converged = solved.report.converged;
    result.rows.push_back(row);
    if (!row.converged)
      result.warnings.push_back("Picard iteration did not converge at n=" + std::to_string(row.n) + " after " +
                                std::to_string(row.picard_iters) + " iterations");
    if (log) {
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      *log << "n=" << row.n << "  err_u " << sci(row.err_u) << "  err_L " << sci(row.err_L) << "  err_p "
           << sci(row.err_p) << "  div " << sci(row.div_l1) << "  iters " << row.picard_iters
           << (row.converged ? "" : " (not converged)") << "  " << fixed2(secs) << " s\n";
    }
  }

  std::vector<int> ns;
  for (const auto& r : result.rows) ns.push_back(r.n);
  if (is_doubling_sequence(ns)) {
    result.rows = rate_table(std::move(result.rows));
    result.rates = true;
  } else {
    result.warnings.push_back("refinement levels do not double; rates omitted");
  }
  if (log)
    for (const auto& w : result.warnings) *log << "warning: " << w << '\n';

  if (!config.out_path.empty()) {
    std::ofstream out(config.out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + config.out_path + "'");
    out << format_table(result, config);
    if (!out) throw std::runtime_error("write to '" + config.out_path + "' failed");
  }
  return result;
}

std::string format_csv(const std::vector<ConvergenceRow>& rows) {
  std::ostringstream out;
  out << "n,h,err_u_rel,rate_u,err_L_rel,rate_L,err_p_rel,rate_p,div_l1,iters\n";
  auto opt = [](const std::optional<Real>& r) { return r ? sci(*r) : std::string(); };
  std::string unconverged;
  for (const auto& r : rows) {
    out << r.n << ',' << sci(r.h) << ',' << sci(r.err_u) << ',' << opt(r.rate_u) << ',' << sci(r.err_L) << ','
        << opt(r.rate_L) << ',' << sci(r.err_p) << ',' << opt(r.rate_p) << ',' << sci(r.div_l1) << ','
        << r.picard_iters << '\n';
    if (!r.converged) unconverged += (unconverged.empty() ? "" : " ") + std::to_string(r.n);
  }
  if (!unconverged.empty()) out << "# not converged: n=" << unconverged << '\n';
  return out.str();
}

std::string format_markdown(const std::vector<ConvergenceRow>& rows, const StudyConfig& config) {
  std::ostringstream out;
  out << "Example " << config.example_id << ", k=" << config.k << ", m=" << config.m() << ", nu=" << config.nu
      << "\n\n";
  out << "| sqrt(2)/h | err u | rate | err L | rate | err p | rate | int abs(div u_h) | Picard |\n";
  out << "|---|---|---|---|---|---|---|---|---|\n";
  auto opt = [](const std::optional<Real>& r) { return r ? fixed2(*r) : std::string(); };
  for (const auto& r : rows)
    out << "| " << r.n << " | " << sci(r.err_u) << " | " << opt(r.rate_u) << " | " << sci(r.err_L) << " | "
        << opt(r.rate_L) << " | " << sci(r.err_p) << " | " << opt(r.rate_p) << " | " << sci(r.div_l1) << " | "
        << r.picard_iters << (r.converged ? "" : " (not converged)") << " |\n";
  return out.str();
}

std::string format_table(const StudyResult& result, const StudyConfig& config) {
  return config.format == OutputFormat::csv ? format_csv(result.rows) : format_markdown(result.rows, config);
}

}  // namespace dfhdg
