#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "dfhdg/study.hpp"
#include "reference_data.hpp"

using namespace dfhdg;

namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("config validation") {
  StudyConfig c;
  CHECK_NOTHROW(validate(c));
  c.k = 4;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = {};
  c.example_id = 3;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = {};
  c.levels = {8, 4};
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = {};
  c.levels = {};
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = {};
  c.nu = 0;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = {};
  c.max_iter = 0;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = {};
  c.reduced_tensor = true;
  c.k = 2;
  CHECK(c.m() == 1);
}

TEST_CASE("short smooth study matches the reference table") {
  StudyConfig c;
  c.levels = {4, 8, 16};
  const StudyResult r = run_study(c);
  REQUIRE(r.rows.size() == 3);
  CHECK(r.rates);
  CHECK(r.all_converged());
  CHECK(r.warnings.empty());
  for (int i = 0; i < 3; ++i) {
    const auto& ref = reference::kSmoothTable[0][i];
    CHECK(r.rows[i].n == ref.n);
    CHECK(r.rows[i].err_u == doctest::Approx(ref.err_u).epsilon(0.05));
    CHECK(r.rows[i].err_L == doctest::Approx(ref.err_L).epsilon(0.05));
    CHECK(r.rows[i].err_p == doctest::Approx(ref.err_p).epsilon(0.05));
    CHECK(r.rows[i].div_l1 < 1e-10);
  }
  CHECK_FALSE(r.rows[0].rate_u.has_value());
  CHECK(*r.rows[2].rate_u == doctest::Approx(1.96).epsilon(0.05));

  const auto csv = lines(format_csv(r.rows));
  REQUIRE(csv.size() == 4);
  CHECK(csv[0] == "n,h,err_u_rel,rate_u,err_L_rel,rate_L,err_p_rel,rate_p,div_l1,iters");
  CHECK(csv[1].rfind("4,3.5355E-01,1.659", 0) == 0);
  CHECK(csv[1].find(",,") != std::string::npos);  // empty rate on the first row

  const std::string md = format_markdown(r.rows, c);
  CHECK(md.find("| 16 |") != std::string::npos);
  CHECK(md.find("1.96") != std::string::npos);

  // identical bytes on a rerun
  CHECK(format_csv(run_study(c).rows) == format_csv(r.rows));
}

TEST_CASE("non-doubling levels omit rates with a warning") {
  StudyConfig c;
  c.levels = {4, 6};
  std::ostringstream log;
  const StudyResult r = run_study(c, &log);
  CHECK_FALSE(r.rates);
  REQUIRE(r.warnings.size() == 1);
  CHECK(r.warnings[0].find("rates omitted") != std::string::npos);
  CHECK(log.str().find("warning:") != std::string::npos);
  for (const auto& row : r.rows) CHECK_FALSE(row.rate_u.has_value());
}

TEST_CASE("unconverged levels are flagged") {
  StudyConfig c;
  c.levels = {4};
  c.max_iter = 1;
  c.tol = 1e-14;
  const StudyResult r = run_study(c);
  CHECK_FALSE(r.all_converged());
  CHECK(format_csv(r.rows).find("# not converged: n=4") != std::string::npos);
  CHECK(format_markdown(r.rows, c).find("(not converged)") != std::string::npos);
}

TEST_CASE("table file and mesh files") {
  const std::string base = "study_test_mesh";
  {
    const Mesh m = build_uniform_mesh(4);
    std::ofstream(base + ".node") << to_node_text(m);
    std::ofstream(base + ".ele") << to_ele_text(m);
  }
  StudyConfig c;
  c.mesh_file = base + ".ele";
  c.out_path = "study_test_table.csv";
  const StudyResult r = run_study(c);
  REQUIRE(r.rows.size() == 1);
  CHECK(r.rows[0].n == 4);
  CHECK(r.rows[0].err_u == doctest::Approx(reference::kSmoothTable[0][0].err_u).epsilon(1e-3));
  std::ifstream in(c.out_path);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(text.str() == format_csv(r.rows));

  c.mesh_file = "does_not_exist";
  CHECK_THROWS_AS(run_study(c), std::runtime_error);
  std::remove((base + ".node").c_str());
  std::remove((base + ".ele").c_str());
  std::remove("study_test_table.csv");
}
