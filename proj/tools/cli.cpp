#include "cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "dfhdg/study.hpp"

namespace dfhdg {

namespace {

std::vector<int> parse_levels(const std::string& text) {
  std::vector<int> levels;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    std::size_t pos = 0;
    int n = 0;
    try {
      n = std::stoi(item, &pos);
    } catch (const std::exception&) {
      pos = std::string::npos;
    }
    if (pos != item.size()) throw std::invalid_argument("--levels: '" + item + "' is not an integer");
    levels.push_back(n);
  }
  return levels;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Divergence-free HDG convergence study for the stationary Navier-Stokes equations"};
  StudyConfig config;
  std::string levels = "4,8,16,32,64";
  std::string m_choice = "k";
  std::string mode = "condensed";
  std::string format = "csv";
  std::string mesh_file;
  Real re = 1.0;

  app.add_option("--example", config.example_id, "1: smooth flow, 2: hydrostatic pressure (u = 0)")
      ->check(CLI::IsMember({1, 2}));
  app.add_option("--k", config.k, "velocity degree")->check(CLI::IsMember({1, 2, 3}));
  app.add_option("--m", m_choice, "degree of the gradient variable: k or k-1")
      ->check(CLI::IsMember({"k", "k-1"}));
  app.add_option("--levels", levels, "comma-separated list of n (cells per side)");
  app.add_option("--re", re, "Reynolds number; nu = 1/Re")->check(CLI::PositiveNumber);
  app.add_option("--tol", config.tol, "Picard tolerance on ||U^{n+1} - U^n||_V")->check(CLI::PositiveNumber);
  app.add_option("--max-iter", config.max_iter, "maximum number of Picard iterations")
      ->check(CLI::PositiveNumber);
  app.add_option("--mode", mode, "global system")->check(CLI::IsMember({"monolithic", "condensed"}));
  app.add_option("--format", format, "table format")->check(CLI::IsMember({"csv", "markdown"}));
  app.add_option("--out", config.out_path, "output file (default: standard output)");
  app.add_option("--mesh-file", mesh_file, "Triangle .node/.ele basename; one run on this mesh");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    config.levels = parse_levels(levels);
    config.reduced_tensor = m_choice == "k-1";
    config.nu = 1.0 / re;
    config.mode = mode == "monolithic" ? SolveMode::monolithic : SolveMode::condensed;
    config.format = format == "markdown" ? OutputFormat::markdown : OutputFormat::csv;
    if (!mesh_file.empty()) config.mesh_file = mesh_file;
    validate(config);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  StudyResult result;
  try {
    result = run_study(config, &err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  if (config.out_path.empty()) out << format_table(result, config);
  return result.all_converged() ? 0 : 2;
}

}  // namespace dfhdg
