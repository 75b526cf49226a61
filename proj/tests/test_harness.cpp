#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "partime/harness.hpp"

using namespace partime;

namespace {

const char* kSmall = R"({
  "name": "small",
  "spatial": {"kind": "laplacian-1d-dirichlet", "n": 6},
  "fine": {"scheme": "backward-euler", "dt": 0.03125},
  "grid": {"Nc": 12, "k": 2},
  "norms": ["l2", "astar_a", "modified"],
  "iterations": 4
})";

ExperimentConfig suite_entry(const std::string& name) {
  for (const auto& c : default_suite())
    if (c.name == name) return c;
  FAIL("missing suite entry " << name);
  return {};
}

}  // namespace

TEST_CASE("configuration parsing") {
  const ExperimentConfig c = parse_config(kSmall);
  CHECK(c.name == "small");
  CHECK(c.spatial.n == 6);
  CHECK(c.grid.N == 23);
  CHECK(c.grid.k == 2);
  CHECK(c.coarse.dt == 0.0);
  CHECK(c.norms.size() == 3);
  CHECK(c.worst_case);
  CHECK_FALSE(c.random_rhs);

  CHECK_THROWS_AS(parse_config(R"({"spatial": {"kind": "laplacian-1d-dirichlet", "n": 4},
    "fine": {"scheme": "backward-euler", "dt": 0.1}, "grid": {"N": 9, "k": 2}, "colour": 1})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"spatial": {"kind": "laplacian-1d-dirichlet", "n": 4},
    "fine": {"scheme": "backward-euler", "dt": 0.1}, "grid": {"N": 10, "k": 4}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"spatial": {"kind": "laplacian-1d-dirichlet", "n": 4},
    "fine": {"scheme": "leapfrog", "dt": 0.1}, "grid": {"N": 9, "k": 2}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
}

TEST_CASE("small experiment and its CSV output") {
  const ExperimentResult r = run_experiment(parse_config(kSmall));
  CHECK(r.ok());
  CHECK(r.rows.size() == 2 * 3 * 5);
  std::ostringstream os;
  write_csv(r, os);
  const std::string csv = os.str();
  CHECK(csv.rfind("iteration,relaxation,norm,value,ratio,bound_lower,bound_upper,bound_kind\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + static_cast<long>(r.rows.size()));

  std::ostringstream js;
  write_json(r, js);
  const auto doc = nlohmann::json::parse(js.str());
  CHECK(doc.at("rows").size() == r.rows.size());
}

TEST_CASE("an exact coarse propagator converges in one iteration") {
  ExperimentConfig c = parse_config(R"({
    "spatial": {"kind": "laplacian-1d-dirichlet", "n": 6},
    "fine": {"scheme": "backward-euler", "dt": 0.03125},
    "coarse": {"scheme": "rational", "dt": 0.03125, "num": [1], "den": [1, -2, 1]},
    "grid": {"Nc": 10, "k": 2},
    "norms": ["l2", "astar_a"],
    "iterations": 3
  })");
  const ExperimentResult r = run_experiment(c);
  CHECK((build_pair(c).Psi - build_pair(c).Phi * build_pair(c).Phi).norm() < 1e-14);
  for (const auto& row : r.rows)
    if (row.iteration >= 1) CHECK(row.value < 1e-12);
}

TEST_CASE("worst-case ratio attains the norm") {
  const ExperimentConfig c = suite_entry("heat-be-k4");
  REQUIRE(c.grid.Nc() == 65);
  REQUIRE(c.spatial.n == 16);
  ExperimentConfig one = c;
  one.iterations = 1;
  one.relaxations = {Relaxation::F};
  one.norms = {NormKind::AstarA};
  const ExperimentResult r = run_experiment(one);
  REQUIRE(r.ok());
  REQUIRE(r.bounds.relax.front().diag.has_value());
  const double upper = r.bounds.relax.front().diag->upper;
  const TraceRow& first = r.rows.at(1);
  REQUIRE(first.ratio.has_value());
  CHECK(*first.ratio >= 0.95 * upper);
  CHECK(*first.ratio <= upper * (1 + 1e-10));
  CHECK(std::abs(*first.ratio - r.bounds.relax.front().dense_residual) < 1e-10);
}

TEST_CASE("runs are deterministic for a fixed seed") {
  ExperimentConfig c = parse_config(kSmall);
  c.worst_case = false;
  c.random_rhs = true;
  c.seed = 99;
  std::ostringstream a, b;
  write_csv(run_experiment(c), a);
  write_csv(run_experiment(c), b);
  CHECK(a.str() == b.str());
}

TEST_CASE("verification reports injected faults") {
  VerifyOptions opt;
  opt.filter = "moore-penrose";
  const VerifyReport clean = verify_suite(opt);
  REQUIRE_FALSE(clean.items.empty());
  CHECK(clean.ok());
  for (const auto& item : clean.items) CHECK(item.name.find("moore-penrose") != std::string::npos);

  opt.corrupt_pinv = true;
  const VerifyReport bad = verify_suite(opt);
  CHECK_FALSE(bad.ok());
  std::ostringstream os;
  write_verify(bad, os);
  CHECK(os.str().find("FAIL") != std::string::npos);
}
