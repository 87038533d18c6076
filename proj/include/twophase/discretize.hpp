#pragma once

#include <array>
#include <span>
#include <variant>
#include <vector>

#include "twophase/grid.hpp"
#include "twophase/rockfluid.hpp"
#include "twophase/sparse.hpp"

namespace twophase {

/// Primary unknowns per cell: wetting pressure and non-wetting saturation.
struct State {
  std::vector<double> p_w;  // Pa
  std::vector<double> s_n;

  static State uniform(int cells, double p_w, double s_n) {
    return {std::vector<double>(cells, p_w), std::vector<double>(cells, s_n)};
  }
  int num_cells() const { return static_cast<int>(p_w.size()); }
  bool operator==(const State&) const = default;
};

/// Unknown layout of the coupled 2N system.
///  VariableBlocked:  [p_0 .. p_{N-1}, s_0 .. s_{N-1}]
///  PointInterleaved: [p_0, s_0, p_1, s_1, ...]
/// The wetting-phase mass balance of a cell shares its row index with the
/// cell's pressure unknown, the non-wetting balance with its saturation.
enum class Ordering { VariableBlocked, PointInterleaved };
enum class Field { Pressure = 0, Saturation = 1 };

constexpr int unknown_index(int cell, Field field, Ordering ordering, int num_cells) {
  const int f = static_cast<int>(field);
  return ordering == Ordering::PointInterleaved ? 2 * cell + f : f * num_cells + cell;
}

/// perm[i] is the index in `to` of unknown i in `from`.
std::vector<int> ordering_permutation(int num_cells, Ordering from, Ordering to);

std::vector<double> pack_state(const State& s, Ordering ordering);
State unpack_state(std::span<const double> u, Ordering ordering);

struct DirichletPressureSaturation {
  double p_w;  // Pa
  double s_w;
  bool operator==(const DirichletPressureSaturation&) const = default;
};

/// Prescribed volumetric inflow through one boundary face (m^3/s, positive
/// into the domain), split between phases by the fractional flow at the
/// inflow saturation.
struct NeumannTotalFlux {
  double rate;
  double s_w_inflow;
  bool operator==(const NeumannTotalFlux&) const = default;
};

struct NoFlow {
  bool operator==(const NoFlow&) const = default;
};

using BoundaryCondition = std::variant<NoFlow, DirichletPressureSaturation, NeumannTotalFlux>;

/// Mass source densities per cell, kg/(m^3 s).
struct SourceTerm {
  std::vector<double> q_w;
  std::vector<double> q_n;
};

/// Everything that defines the discrete nonlinear system apart from the
/// states and the time step.
class TwoPhaseProblem {
 public:
  TwoPhaseProblem(Grid grid, RockProps rock, FluidProps fluid, CapillaryModel capillary,
                  RelPermModel relperm, std::vector<BoundaryCondition> boundary = {},
                  SourceTerm sources = {});

  const Grid& grid() const { return grid_; }
  const RockProps& rock() const { return rock_; }
  const FluidProps& fluid() const { return fluid_; }
  const CapillaryModel& capillary() const { return capillary_; }
  const RelPermModel& relperm() const { return relperm_; }
  std::span<const BoundaryCondition> boundary() const { return boundary_; }
  const SourceTerm& sources() const { return sources_; }
  int num_cells() const { return grid_.num_cells(); }

  /// Face transmissibility gamma * K_harm / dx (m^3), aligned with grid().faces().
  std::span<const double> transmissibility() const { return trans_; }
  /// Half-cell transmissibility of each boundary face.
  std::span<const double> boundary_transmissibility() const { return bc_trans_; }

 private:
  Grid grid_;
  RockProps rock_;
  FluidProps fluid_;
  CapillaryModel capillary_;
  RelPermModel relperm_;
  std::vector<BoundaryCondition> boundary_;
  SourceTerm sources_;
  std::vector<double> trans_;
  std::vector<double> bc_trans_;
};

/// Coupled Jacobian in one of the two orderings with access to the four
/// N x N blocks A_pp, A_ps, A_sp, A_ss.
class BlockJacobian {
 public:
  BlockJacobian(SparseMatrix coupled, Ordering ordering, int num_cells);

  const SparseMatrix& coupled() const { return coupled_; }
  Ordering ordering() const { return ordering_; }
  int num_cells() const { return num_cells_; }

  SparseMatrix block(Field row, Field col) const;
  SparseMatrix a_pp() const { return block(Field::Pressure, Field::Pressure); }
  SparseMatrix a_ps() const { return block(Field::Pressure, Field::Saturation); }
  SparseMatrix a_sp() const { return block(Field::Saturation, Field::Pressure); }
  SparseMatrix a_ss() const { return block(Field::Saturation, Field::Saturation); }

  BlockJacobian reordered(Ordering to) const;

  /// Reassembles a coupled matrix from four blocks.
  static BlockJacobian from_blocks(const SparseMatrix& app, const SparseMatrix& aps, const SparseMatrix& asp,
                                   const SparseMatrix& ass, Ordering ordering);

 private:
  SparseMatrix coupled_;
  Ordering ordering_;
  int num_cells_;
};

/// Backward-Euler residual: per cell and phase,
///   (xi^{n+1} - xi^n) + dt/V * (sum of outward face mass fluxes) - dt * Q.
std::vector<double> assemble_residual(const TwoPhaseProblem& problem, const State& state_new,
                                      const State& state_old, double dt,
                                      Ordering ordering = Ordering::PointInterleaved);

/// Exact derivative of assemble_residual with respect to (p_w, s_n),
/// holding the upwind selection fixed.
BlockJacobian assemble_jacobian(const TwoPhaseProblem& problem, const State& state_new,
                                const State& state_old, double dt,
                                Ordering ordering = Ordering::PointInterleaved);

struct PhaseTotals {
  double water = 0.0;
  double oil = 0.0;
};

/// Total mass of each phase in the domain, kg.
PhaseTotals phase_mass(const TwoPhaseProblem& problem, const State& state);
/// Net mass outflow rate through the boundary, kg/s, evaluated at `state`.
PhaseTotals boundary_outflow(const TwoPhaseProblem& problem, const State& state);
/// Total source mass rate, kg/s.
PhaseTotals source_rate(const TwoPhaseProblem& problem);

}  // namespace twophase
