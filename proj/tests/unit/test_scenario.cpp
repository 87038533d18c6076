#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "fixtures.hpp"
#include "twophase/errors.hpp"
#include "twophase/scenario.hpp"

using namespace twophase;

namespace {

const std::filesystem::path kDir = TWOPHASE_SCENARIO_DIR;

const char* kMinimal = R"([grid]
nx = 4
nz = 2
lx = 4 m
lz = 2 m
gravity = z

[capillary]
model = linear
p0 = 1e4 Pa

[time]
dt = 1 day
t_final = 2 days
)";

Scenario parse(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in);
}

}  // namespace

TEST_CASE("shipped Ex 1 configuration") {
  const Scenario s = load_scenario(kDir / "example1_linear.cfg");
  REQUIRE(std::holds_alternative<LinearCapillary>(s.capillary.law));
  CHECK(std::get<LinearCapillary>(s.capillary.law).p0 == 1e5);
  CHECK(s.fluid.rho_n == 700.0);
  CHECK(s.fluid.rho_w == 1000.0);
  CHECK(s.fluid.mu_n == doctest::Approx(0.01));
  CHECK(s.fluid.mu_w == doctest::Approx(0.001));
  CHECK(s.porosity == 0.2);
  CHECK(s.grid.nx == 100);
  CHECK(s.grid.nz == 20);
  CHECK(s.dt == 20 * units::day);
  CHECK(s.preconditioner.kind == PreconditionerKind::BlockFactorization);
  CHECK(s.boundaries.size() == 2);
}

TEST_CASE("defaults for a minimal configuration") {
  const Scenario s = parse(kMinimal);
  CHECK(s.preconditioner.kind == PreconditionerKind::BlockFactorization);
  CHECK(s.newton == NewtonParams{});
  CHECK(s.fluid == FluidProps{});
  CHECK(s.grid.gravity_axis == Axis::Z);
  CHECK(s.dt == units::day);
  CHECK(s.t_final == 2 * units::day);
}

TEST_CASE("every shipped scenario validates and round trips") {
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(kDir)) {
    if (entry.path().extension() != ".cfg" || entry.path().filename().string().find("suite") != std::string::npos)
      continue;
    CAPTURE(entry.path().string());
    const Scenario s = load_scenario(entry.path());
    CHECK_NOTHROW(s.validate());
    std::stringstream out;
    write_scenario(out, s);
    CHECK(parse_scenario(out, kDir) == s);
    ++count;
  }
  CHECK(count >= 8);
}

TEST_CASE("round trip keeps solver and AMG settings") {
  Scenario s = parse(kMinimal);
  s.preconditioner.kind = PreconditionerKind::CprAmg2;
  s.preconditioner.scalar_amg.strength_threshold = 0.3;
  s.preconditioner.scalar_amg.max_row_sum = 1.0;
  s.preconditioner.coupled_amg.num_functions = 1;
  s.preconditioner.inner = InnerSolve::Exact;
  s.newton.attainable_factor = 0.0;
  s.newton.line_search = true;
  s.capillary = CapillaryModel{BrooksCoreyCapillary{2e5, 1.5}, 1e-4};
  s.relperm = CoreyRelPerm{1.5};
  s.permeability = LognormalPermeability{50 * units::millidarcy, 0.9, 17, 0.1};
  s.sources.push_back({"well", {{1, 0, 0}, {1, 0, 1}}, Phase::NonWetting, 1e-7});
  std::stringstream out;
  write_scenario(out, s);
  CHECK(parse_scenario(out) == s);
}

TEST_CASE("negative viscosity is rejected") {
  std::string text = kMinimal;
  text += "\n[fluid]\nmu_n = -1 cP\n";
  CHECK_THROWS_AS(parse(text), ValidationError);
}

TEST_CASE("unknown key is a parse error with its line") {
  std::string text = kMinimal;
  text.insert(text.find("lz = 2 m"), "colour = blue\n");
  try {
    parse(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 5);
  }
  CHECK_THROWS_AS(parse(std::string(kMinimal) + "\n[weather]\nwind = 3\n"), ParseError);
  CHECK_THROWS_AS(parse("[grid]\nnx = 4\n"), ParseError);
  CHECK_THROWS_AS(load_scenario(kDir / "no_such_file.cfg"), ParseError);
}

TEST_CASE("bad values are reported") {
  std::string text = kMinimal;
  text.replace(text.find("nx = 4"), 6, "nx = four");
  CHECK_THROWS_AS(parse(text), ParseError);
  text = kMinimal;
  text.replace(text.find("dt = 1 day"), 10, "dt = 1 fortnight");
  CHECK_THROWS_AS(parse(text), ParseError);
  text = kMinimal;
  text.replace(text.find("dt = 1 day"), 10, "dt = -1 day");
  CHECK_THROWS_AS(parse(text), ValidationError);
}

TEST_CASE("quantities convert to SI") {
  CHECK(parse_quantity("100 mD", Quantity::Permeability) == doctest::Approx(9.869233e-14));
  CHECK(parse_quantity("1 D", Quantity::Permeability) == doctest::Approx(9.869233e-13));
  CHECK(parse_quantity("10 cP", Quantity::Viscosity) == doctest::Approx(0.01));
  CHECK(parse_quantity("2 days", Quantity::Time) == 172800.0);
  CHECK(parse_quantity("50 m3/day", Quantity::VolumetricRate) == doctest::Approx(50.0 / 86400));
  CHECK(parse_quantity("1 bar", Quantity::Pressure) == 1e5);
  CHECK(parse_quantity("2.5", Quantity::Length) == 2.5);
  CHECK(parse_quantity("30 cm", Quantity::Length) == doctest::Approx(0.3));
  CHECK_THROWS_AS(parse_quantity("3 kg/m3", Quantity::Pressure), ValidationError);
  CHECK_THROWS_AS(parse_quantity("abc", Quantity::Length), ValidationError);
}

TEST_CASE("Neumann rate is split across the selected faces by area") {
  const Grid grid(4, 1, 5, 4, 1, 5, Axis::Z);
  BoundarySpec inlet{"inlet", Side::XMin, {{0, 0, 3}, {3, 0, 4}}, NeumannTotalFlux{1e-5, 1.0}};
  BoundarySpec outlet{"outlet", Side::XMax, {{0, 0, 0}, {3, 0, 0}}, DirichletPressureSaturation{1e5, 0.2}};
  const auto bc = boundary_conditions(grid, {inlet, outlet});
  double total = 0;
  int neumann = 0, dirichlet = 0;
  for (std::size_t f = 0; f < bc.size(); ++f) {
    if (const auto* n = std::get_if<NeumannTotalFlux>(&bc[f])) {
      CHECK(grid.boundary_faces()[f].side == Side::XMin);
      CHECK(n->rate == doctest::Approx(0.5e-5));
      total += n->rate;
      ++neumann;
    }
    if (std::holds_alternative<DirichletPressureSaturation>(bc[f])) ++dirichlet;
  }
  CHECK(neumann == 2);
  CHECK(dirichlet == 1);
  CHECK(total == doctest::Approx(1e-5));
}

TEST_CASE("sources are spread over the box by volume") {
  const Grid grid(3, 1, 2, 3, 1, 2);
  const FluidProps fluid;
  const auto src = source_term(grid, fluid, {{"w", {{0, 0, 0}, {1, 0, 0}}, Phase::Wetting, 2e-6}});
  double mass = 0;
  for (int c = 0; c < grid.num_cells(); ++c) {
    mass += src.q_w[c] * grid.cell_volume();
    CHECK(src.q_n[c] == 0.0);
  }
  CHECK(mass == doctest::Approx(fluid.rho_w * 2e-6));
  CHECK(src.q_w[0] == src.q_w[1]);
  CHECK(src.q_w[2] == 0.0);
}

TEST_CASE("problem construction from a scenario") {
  const Scenario s = load_scenario(kDir / "gravity_diffusion_20.cfg");
  const TwoPhaseProblem pb = build_problem(s);
  CHECK(pb.num_cells() == 400);
  const State s0 = initial_state(s);
  CHECK(s0.p_w[0] == s.initial_p_w);
  CHECK(s0.s_n[123] == s.initial_s_n);
  const SimulationConfig cfg = simulation_config(s);
  CHECK(cfg.dt == s.dt);
  CHECK(cfg.preconditioner == s.preconditioner);
}
