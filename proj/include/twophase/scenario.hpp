#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "twophase/discretize.hpp"
#include "twophase/grid.hpp"
#include "twophase/precond.hpp"
#include "twophase/rockfluid.hpp"
#include "twophase/sim.hpp"

namespace twophase {

enum class Quantity {
  Dimensionless,
  Length,         // m, cm, ft
  Pressure,       // Pa, kPa, MPa, bar, psi
  Density,        // kg/m3
  Viscosity,      // Pa.s, cP
  Permeability,   // m2, mD, D
  Time,           // s, h, day, days
  VolumetricRate, // m3/s, m3/day
  Acceleration    // m/s2
};

/// Parses "<number> [unit]" and converts to SI. A bare number is taken as SI.
/// Throws ValidationError for units outside the documented set.
double parse_quantity(const std::string& text, Quantity q);

/// Inclusive cell index box.
struct CellBox {
  std::array<int, 3> lo{0, 0, 0};
  std::array<int, 3> hi{0, 0, 0};

  bool contains(const std::array<int, 3>& ijk) const;
  bool operator==(const CellBox&) const = default;
};

struct GridSpec {
  int nx = 1, ny = 1, nz = 1;
  double lx = 1.0, ly = 1.0, lz = 1.0;  // m
  std::optional<Axis> gravity_axis;

  Grid build() const { return Grid(nx, ny, nz, lx, ly, lz, gravity_axis); }
  CellBox full_box() const { return {{0, 0, 0}, {nx - 1, ny - 1, nz - 1}}; }
  bool operator==(const GridSpec&) const = default;
};

struct UniformPermeability {
  std::array<double, 3> k{};  // m^2
  bool operator==(const UniformPermeability&) const = default;
};

/// Independent lognormal cell values: ln K ~ N(ln geometric_mean, log_std^2),
/// kz = vertical_ratio * kx.
struct LognormalPermeability {
  double geometric_mean = 0.0;  // m^2
  double log_std = 1.0;
  std::uint64_t seed = 1;
  double vertical_ratio = 1.0;
  bool operator==(const LognormalPermeability&) const = default;
};

/// Slab of an SPE10-layout data set; the slab extent is the scenario grid.
struct Spe10Permeability {
  std::string perm_path;
  std::string poro_path;  // empty: use the scenario porosity
  std::array<int, 3> file_dims{60, 220, 85};
  std::array<int, 3> origin{0, 0, 0};
  bool operator==(const Spe10Permeability&) const = default;
};

using PermeabilitySource = std::variant<UniformPermeability, LognormalPermeability, Spe10Permeability>;

struct BoundarySpec {
  std::string name;
  Side side = Side::XMin;
  CellBox box;  // restricts the faces on `side` to cells inside the box
  // For NeumannTotalFlux the rate is the total over all selected faces (m^3/s),
  // distributed by face area.
  BoundaryCondition condition = NoFlow{};
  bool operator==(const BoundarySpec&) const = default;
};

enum class Phase { Wetting, NonWetting };

/// Volumetric injection (positive) or extraction of one phase, spread over
/// the cells of the box by volume.
struct SourceSpec {
  std::string name;
  CellBox box;
  Phase phase = Phase::Wetting;
  double rate = 0.0;  // m^3/s
  bool operator==(const SourceSpec&) const = default;
};

struct OutputSpec {
  std::string directory = "output";
  int snapshot_every = 0;
  bool operator==(const OutputSpec&) const = default;
};

struct Scenario {
  std::string name = "scenario";
  GridSpec grid;
  FluidProps fluid;
  double porosity = 0.2;
  double s_wr = 0.0;
  double s_nr = 0.0;
  PermeabilitySource permeability = UniformPermeability{};
  CapillaryModel capillary;
  RelPermModel relperm = QuadraticRelPerm{};
  double initial_p_w = 1e5;  // Pa
  double initial_s_n = 0.8;
  std::vector<BoundarySpec> boundaries;
  std::vector<SourceSpec> sources;
  double dt = 0.0;       // s
  double t_final = 0.0;  // s
  PreconditionerSpec preconditioner;
  NewtonParams newton;
  OutputSpec output;

  /// Checks every constraint; throws ValidationError naming the first violation.
  void validate() const;
  bool operator==(const Scenario&) const = default;
};

/// Reads the sectioned key/value format documented in the README. Relative
/// file paths are resolved against the config file's directory.
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(std::istream& in, const std::filesystem::path& base_dir = {});

/// Writes a config that load_scenario reads back to an identical Scenario.
void write_scenario(std::ostream& out, const Scenario& s);
void save_scenario(const std::filesystem::path& path, const Scenario& s);

RockProps build_rock(const Scenario& s);
TwoPhaseProblem build_problem(const Scenario& s);
State initial_state(const Scenario& s);
SimulationConfig simulation_config(const Scenario& s);

/// Per-boundary-face conditions for `grid` (NoFlow where nothing applies; a
/// later BoundarySpec overrides an earlier one on the same face).
std::vector<BoundaryCondition> boundary_conditions(const Grid& grid, const std::vector<BoundarySpec>& specs);
SourceTerm source_term(const Grid& grid, const FluidProps& fluid, const std::vector<SourceSpec>& specs);

/// Output directory honoring the TWOPHASE_OUTPUT_DIR override.
std::filesystem::path output_directory(const Scenario& s);

}  // namespace twophase
