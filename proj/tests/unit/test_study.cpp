#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "twophase/errors.hpp"
#include "twophase/study.hpp"

using namespace twophase;

namespace {

const std::filesystem::path kDir = TWOPHASE_SCENARIO_DIR;

const std::vector<PreconditionerKind> kAll{PreconditionerKind::CoupledAmg, PreconditionerKind::CprAmg1,
                                           PreconditionerKind::CprAmg2, PreconditionerKind::BlockFactorization};

// One step of a desk case on a coarser 20 x 6 grid.
Scenario small_desk(const std::string& file) {
  Scenario s = load_scenario(kDir / file);
  s.grid.lx *= 20.0 / s.grid.nx;
  s.grid.lz *= 6.0 / s.grid.nz;
  s.grid.nx = 20;
  s.grid.nz = 6;
  s.boundaries[0].box.lo[2] = 4;
  s.boundaries[0].box.hi[2] = 5;
  s.boundaries[1].box.hi[2] = 1;
  for (auto& b : s.boundaries) b.box.hi[0] = s.grid.nx - 1;
  s.t_final = s.dt;
  s.validate();
  return s;
}

std::vector<std::string> lines_without_wall_time(const std::string& csv) {
  std::vector<std::string> out;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cols;
    std::stringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cols.push_back(c);
    cols.erase(cols.begin() + 5);
    std::string joined;
    for (const auto& x : cols) joined += x + ",";
    out.push_back(joined);
  }
  return out;
}

}  // namespace

TEST_CASE("empty suite writes only the header") {
  BenchmarkSuite suite;
  std::ostringstream out;
  write_metrics_csv(out, run_benchmark(suite));
  CHECK(out.str() == "scenario,method,NI,LI,LI_per_NI,wall_seconds,converged,amg_operator_complexity\n");
}

TEST_CASE("four methods on a diffusion-dominated case share NI") {
  BenchmarkSuite suite;
  suite.cases.push_back({"ex1", small_desk("desk_ex1_linear.cfg"), kAll});
  const auto records = run_benchmark(suite);
  REQUIRE(records.size() == 4);
  for (const auto& r : records) {
    CAPTURE(r.method);
    CHECK(r.scenario == "ex1");
    CHECK(r.metrics.converged);
    CHECK(r.metrics.step_cut_count == 0);
    CHECK(r.metrics.total_newton == records[0].metrics.total_newton);
  }
  std::ostringstream out;
  write_metrics_csv(out, records);
  CHECK(lines_without_wall_time(out.str()).size() == 5);
}

TEST_CASE("a diverging coupled AMG run is kept as a row") {
  BenchmarkSuite suite;
  suite.cases.push_back({"ex3", small_desk("desk_ex3_linear.cfg"), kAll});
  const auto records = run_benchmark(suite);
  REQUIRE(records.size() == 4);
  CHECK(records[0].method == "amg");
  CHECK_FALSE(records[0].metrics.converged);
  CHECK_FALSE(records[0].metrics.failure_reason.empty());
  for (std::size_t i = 1; i < 4; ++i) {
    CHECK(records[i].metrics.converged);
    CHECK(records[i].metrics.total_newton == records[1].metrics.total_newton);
  }
  std::ostringstream out;
  write_metrics_csv(out, records);
  CHECK(out.str().find("ex3,amg,") != std::string::npos);
  CHECK(lines_without_wall_time(out.str())[1].find(",false,") != std::string::npos);
}

TEST_CASE("metrics are deterministic apart from wall time") {
  BenchmarkSuite suite;
  suite.cases.push_back({"ex1", small_desk("desk_ex1_linear.cfg"),
                         {PreconditionerKind::CprAmg1, PreconditionerKind::BlockFactorization}});
  std::ostringstream a, b;
  write_metrics_csv(a, run_benchmark(suite));
  write_metrics_csv(b, run_benchmark(suite));
  CHECK(lines_without_wall_time(a.str()) == lines_without_wall_time(b.str()));

  std::ostringstream json;
  write_metrics_json(json, run_benchmark(suite));
  CHECK(json.str().find("\"floor_limited_solves\"") != std::string::npos);
  CHECK(json.str().find("\"linear_per_newton\"") != std::string::npos);
}

TEST_CASE("suite files") {
  const auto path = std::filesystem::temp_directory_path() / "twophase_test_suite.cfg";
  {
    std::ofstream out(path);
    out << "[suite]\nname = tiny\nrepetitions = 2\n\n[case:ex1]\nscenario = " << (kDir / "desk_ex1_linear.cfg").string()
        << "\nmethods = bf cpr-amg1\n\n[case:grav]\nscenario = " << (kDir / "gravity_diffusion_20.cfg").string()
        << "\n";
  }
  const BenchmarkSuite suite = load_suite(path);
  CHECK(suite.name == "tiny");
  CHECK(suite.repetitions == 2);
  REQUIRE(suite.cases.size() == 2);
  CHECK(suite.cases[0].name == "ex1");
  CHECK(suite.cases[0].methods ==
        std::vector<PreconditionerKind>{PreconditionerKind::BlockFactorization, PreconditionerKind::CprAmg1});
  CHECK(suite.cases[1].methods == std::vector<PreconditionerKind>{PreconditionerKind::BlockFactorization});
  {
    std::ofstream out(path);
    out << "[case:x]\nscenario = " << (kDir / "desk_ex1_linear.cfg").string() << "\nmethods = jacobi\n";
  }
  CHECK_THROWS_AS(load_suite(path), ParseError);
  std::filesystem::remove(path);
}

TEST_CASE("Jacobian capture and preconditioned spectrum") {
  Scenario s = small_desk("desk_ex2_linear.cfg");
  const BlockJacobian j0 = capture_jacobian(s, 0);
  const BlockJacobian j1 = capture_jacobian(s, 1);
  CHECK(j0.num_cells() == 120);
  CHECK_FALSE(j0.coupled() == j1.coupled());
  CHECK_THROWS_AS(capture_jacobian(s, 500), ValidationError);

  const auto exact = preconditioned_spectrum(j1, s, PreconditionerKind::ExactJacobian);
  REQUIRE(exact.size() == 240);
  for (const auto& z : exact) CHECK(std::abs(z - 1.0) < 1e-8);

  const auto bf = preconditioned_spectrum(j1, s, PreconditionerKind::BlockFactorization);
  const auto cpr1 = preconditioned_spectrum(j1, s, PreconditionerKind::CprAmg1);
  CHECK(std::abs(bf.front()) > std::abs(cpr1.front()));

  std::ostringstream out;
  write_spectrum_csv(out, exact);
  CHECK(out.str().rfind("re,im", 0) == 0);
}

TEST_CASE("state CSV has one row per cell") {
  const Grid grid(3, 1, 2, 3, 1, 2);
  std::ostringstream out;
  write_state_csv(out, grid, State::uniform(6, 1e5, 0.5));
  int lines = 0;
  std::istringstream in(out.str());
  for (std::string l; std::getline(in, l);) ++lines;
  CHECK(lines == 7);
}
