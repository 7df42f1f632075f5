#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <string>

#include "mtypes/runner.hpp"

using namespace mtypes;

namespace {

const char* kEx1Enumerate = R"(
# worked frequency-constraint example
law = enumerate
q = 1/3 1/3 1/3
constraint = frequency
alpha = 2
a = 21/50
n_schedule = 30
mode = exact
)";

int run_code(const std::string& text) {
  try {
    run(ExperimentConfig::parse(text));
    return 0;
  } catch (const Error& e) {
    return exit_code_for(e);
  }
}

}  // namespace

TEST_CASE("config: parse and validate") {
  const auto c = ExperimentConfig::parse(kEx1Enumerate);
  CHECK(c.law == "enumerate");
  CHECK(c.q.size() == 3);
  CHECK(c.alpha == 2.0);
  CHECK(c.n_schedule == std::vector<std::int64_t>{30});
}

TEST_CASE("config: unknown keys are rejected") {
  CHECK_THROWS_AS(ExperimentConfig::parse("law = enumerate\nfrobnicate = 1\n"), Error);
}

TEST_CASE("config: malformed and incomplete inputs") {
  CHECK_THROWS_AS(ExperimentConfig::parse("law enumerate\n"), Error);
  CHECK_THROWS_AS(ExperimentConfig::parse("law = dance\n"), Error);
  // icet without epsilon
  CHECK_THROWS_AS(ExperimentConfig::parse("law = icet\nq = 1/2 1/2\n"
                                          "constraint = fullsimplex\nn = 5\n"),
                  Error);
}

TEST_CASE("run: enumerate produces the stable CSV schema") {
  const auto res = run(ExperimentConfig::parse(kEx1Enumerate));
  CHECK(res.data.rfind("law,n,j,epsilon,tau,value,reference,abs_error\n", 0) == 0);
  CHECK(res.data.find("enumerate,30,,,0,12,,") != std::string::npos);
}

TEST_CASE("run: json carries exact rationals as strings") {
  auto cfg = ExperimentConfig::parse(kEx1Enumerate);
  cfg.format = "json";
  const auto res = run(cfg);
  CHECK(res.data.find("\"value_exact\": \"12\"") != std::string::npos);
}

TEST_CASE("run: exit codes for the error classes") {
  // validation
  CHECK(run_code("law = icet\n") == 2);
  // empty feasible set: scaled two-point set probed off its grid
  CHECK(run_code("law = rational\nq = 1/2 1/2\nnu = 6 4\nnu_dot = 9 1\nn = 25\n") == 4);
  // numerical: enumeration budget exhausted
  CHECK(run_code("law = enumerate\nq = 1/3 1/3 1/3\nconstraint = frequency\n"
                 "alpha = 2\na = 21/50\nn = 300\nbudget = 10\n") == 3);
  // fine at a multiple of the base size
  CHECK(run_code("law = rational\nq = 1/2 1/2\nnu = 6 4\nnu_dot = 9 1\nn = 20 30\n") == 0);
}

TEST_CASE("run: icet subcommand family handles the cwlln law tag") {
  const char* text = R"(
law = cwlln
q = 1/3 1/3 1/3
constraint = moment
u = 1 2 3
a = 5/2
n_schedule = 20 40
epsilon = 0.2
)";
  const auto res = run(ExperimentConfig::parse(text));
  CHECK(res.data.find("cwlln,20,1,") != std::string::npos);
  CHECK(res.data.find("cwlln,40,1,") != std::string::npos);
}

TEST_CASE("run: egcp law emits one row per prefix") {
  const char* text = R"(
law = egcp
q = 1/3 1/3 1/3
constraint = moment
u = 1 2 3
a_list = 5/2 3/2
t = 1
n_schedule = 40
)";
  const auto res = run(ExperimentConfig::parse(text));
  // three single-letter prefixes
  CHECK(res.records.size() == 3);
  double sum = 0;
  for (const auto& r : res.records) sum += *r.value;
  CHECK_THAT(sum, Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("run: rates law flags empty cells and keeps measured ones") {
  const char* text = R"(
law = rates
q = 1/3 1/3 1/3
constraint = moment
u = 1 2 3
a = 5/2
n_schedule = 9 10 20
)";
  const auto res = run(ExperimentConfig::parse(text));
  REQUIRE(res.records.size() == 3);
  CHECK(res.records[0].empty_feasible);  // 2.5 * 9 is not an integer count
  CHECK(res.records[1].value.has_value());
  CHECK(res.records[2].value.has_value());
}

TEST_CASE("run: reruns are byte-identical") {
  const char* text = R"(
law = icet
q = 1/3 1/3 1/3
constraint = frequency
alpha = 2
a = 21/50
n_schedule = 30 60 90
epsilon = 0.17320508075688773
mode = float
tau = 1e-4
)";
  const auto a = run(ExperimentConfig::parse(text));
  const auto b = run(ExperimentConfig::parse(text));
  CHECK(a.data == b.data);
  CHECK(a.table == b.table);
}

TEST_CASE("run: output does not depend on the worker count") {
  const char* text = R"(
law = icet
q = 1/3 1/3 1/3
constraint = frequency
alpha = 2
a = 21/50
n_schedule = 30 60 90 120
epsilon = 0.17320508075688773
mode = float
tau = 1e-4
)";
  setenv("MTYPES_WORKERS", "1", 1);
  const auto a = run(ExperimentConfig::parse(text));
  setenv("MTYPES_WORKERS", "4", 1);
  const auto b = run(ExperimentConfig::parse(text));
  unsetenv("MTYPES_WORKERS");
  CHECK(a.data == b.data);
}

TEST_CASE("reproduce: every preset runs clean and reports no failures") {
  for (const auto& name : preset_names()) {
    const auto res = reproduce(name, "csv");
    INFO(name << ":\n" << res.table);
    CHECK(res.exit_code == 0);
    CHECK(res.table.find("[FAIL]") == std::string::npos);
    CHECK_FALSE(res.records.empty());
    CHECK(res.data.rfind("law,n,j,epsilon,tau,value,reference,abs_error\n", 0) == 0);
  }
}

TEST_CASE("reproduce: unknown preset is a validation error") {
  CHECK_THROWS_AS(reproduce("example3", "csv"), Error);
}

TEST_CASE("reproduce: json format carries the exact third") {
  const auto res = reproduce("example1", "json");
  CHECK(res.data.find("\"value_exact\": \"1/3\"") != std::string::npos);
  CHECK(res.data.find("\"value_exact\": \"99/433\"") != std::string::npos);
}
