#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

using namespace dfhdg;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "dfhdg");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("help") {
  const Run r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("--levels") != std::string::npos);
}

TEST_CASE("invalid arguments exit with 1") {
  for (const auto& args : std::vector<std::vector<std::string>>{{"--k", "5"},
                                                                {"--example", "3"},
                                                                {"--m", "k+1"},
                                                                {"--levels", "4,x"},
                                                                {"--levels", "8,4"},
                                                                {"--re", "-1"},
                                                                {"--mode", "iterative"},
                                                                {"--format", "xml"},
                                                                {"--bogus"},
                                                                {"--mesh-file", "no_such_mesh"}}) {
    const Run r = run(args);
    INFO(args[0]);
    CHECK(r.code == 1);
    CHECK(r.err.find("error") != std::string::npos);
  }
}

TEST_CASE("csv to standard output") {
  const Run r = run({"--levels", "4,8"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("n,h,err_u_rel,rate_u,err_L_rel,rate_L,err_p_rel,rate_p,div_l1,iters\n4,", 0) == 0);
  CHECK(r.out.find("\n8,") != std::string::npos);
}

TEST_CASE("non-doubling levels warn and still succeed") {
  const Run r = run({"--levels", "4,6"});
  CHECK(r.code == 0);
  CHECK(r.err.find("rates omitted") != std::string::npos);
}

TEST_CASE("non-convergence exits with 2 and still emits rows") {
  const Run r = run({"--levels", "4", "--max-iter", "1", "--tol", "1e-14"});
  CHECK(r.code == 2);
  CHECK(r.out.find("# not converged: n=4") != std::string::npos);
}

TEST_CASE("markdown to a file, monolithic hydrostatic run") {
  const std::string path = std::string(DFHDG_TEST_TMPDIR) + "/cli_table.md";
  const Run r = run({"--example", "2", "--k", "2", "--m", "k-1", "--levels", "2,4", "--mode", "monolithic", "--format",
                     "markdown", "--out", path});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(text.str().rfind("Example 2, k=2, m=1", 0) == 0);
  CHECK(text.str().find("| 4 |") != std::string::npos);
}

TEST_CASE("unwritable output exits with 1") {
  const Run r = run({"--levels", "2", "--out", "/nonexistent_dir/table.csv"});
  CHECK(r.code == 1);
}
