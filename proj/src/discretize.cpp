#include "twophase/discretize.hpp"

#include <cmath>

#include "twophase/errors.hpp"

namespace twophase {

std::vector<int> ordering_permutation(int num_cells, Ordering from, Ordering to) {
  std::vector<int> perm(2 * num_cells);
  for (int c = 0; c < num_cells; ++c)
    for (Field f : {Field::Pressure, Field::Saturation})
      perm[unknown_index(c, f, from, num_cells)] = unknown_index(c, f, to, num_cells);
  return perm;
}

std::vector<double> pack_state(const State& s, Ordering ordering) {
  const int n = s.num_cells();
  std::vector<double> u(2 * n);
  for (int c = 0; c < n; ++c) {
    u[unknown_index(c, Field::Pressure, ordering, n)] = s.p_w[c];
    u[unknown_index(c, Field::Saturation, ordering, n)] = s.s_n[c];
  }
  return u;
}

State unpack_state(std::span<const double> u, Ordering ordering) {
  const int n = static_cast<int>(u.size() / 2);
  State s{std::vector<double>(n), std::vector<double>(n)};
  for (int c = 0; c < n; ++c) {
    s.p_w[c] = u[unknown_index(c, Field::Pressure, ordering, n)];
    s.s_n[c] = u[unknown_index(c, Field::Saturation, ordering, n)];
  }
  return s;
}

TwoPhaseProblem::TwoPhaseProblem(Grid grid, RockProps rock, FluidProps fluid, CapillaryModel capillary,
                                 RelPermModel relperm, std::vector<BoundaryCondition> boundary,
                                 SourceTerm sources)
    : grid_(std::move(grid)),
      rock_(std::move(rock)),
      fluid_(fluid),
      capillary_(std::move(capillary)),
      relperm_(relperm),
      boundary_(std::move(boundary)),
      sources_(std::move(sources)) {
  const int n = grid_.num_cells();
  if (rock_.num_cells() != n) throw DimensionError("rock properties do not match the grid");
  rock_.validate();
  fluid_.validate();
  capillary_.validate();
  const auto bfaces = grid_.boundary_faces();
  if (boundary_.empty()) boundary_.assign(bfaces.size(), NoFlow{});
  if (boundary_.size() != bfaces.size()) throw DimensionError("one boundary condition per boundary face required");
  if (sources_.q_w.empty()) sources_.q_w.assign(n, 0.0);
  if (sources_.q_n.empty()) sources_.q_n.assign(n, 0.0);
  if (static_cast<int>(sources_.q_w.size()) != n || static_cast<int>(sources_.q_n.size()) != n)
    throw DimensionError("source terms do not match the grid");

  trans_.reserve(grid_.faces().size());
  for (const Face& f : grid_.faces()) {
    const int a = static_cast<int>(f.axis);
    const double h = grid_.spacing(f.axis);
    const double k = harmonic_face_permeability(rock_.perm[f.cell_i][a], rock_.perm[f.cell_j][a], h, h);
    trans_.push_back(f.area * k / f.distance);
  }
  bc_trans_.reserve(bfaces.size());
  for (const BoundaryFace& b : bfaces)
    bc_trans_.push_back(b.area * rock_.perm[b.cell][static_cast<int>(b.axis)] / b.half_distance);
}

BlockJacobian::BlockJacobian(SparseMatrix coupled, Ordering ordering, int num_cells)
    : coupled_(std::move(coupled)), ordering_(ordering), num_cells_(num_cells) {
  if (coupled_.rows() != 2 * num_cells || coupled_.cols() != 2 * num_cells)
    throw DimensionError("block Jacobian must be 2N x 2N");
}

SparseMatrix BlockJacobian::block(Field row, Field col) const {
  std::vector<int> rows(num_cells_), cols(num_cells_);
  for (int c = 0; c < num_cells_; ++c) {
    rows[c] = unknown_index(c, row, ordering_, num_cells_);
    cols[c] = unknown_index(c, col, ordering_, num_cells_);
  }
  return submatrix(coupled_, rows, cols);
}

BlockJacobian BlockJacobian::reordered(Ordering to) const {
  if (to == ordering_) return *this;
  return BlockJacobian(permute_symmetric(coupled_, ordering_permutation(num_cells_, ordering_, to)), to,
                       num_cells_);
}

BlockJacobian BlockJacobian::from_blocks(const SparseMatrix& app, const SparseMatrix& aps,
                                         const SparseMatrix& asp, const SparseMatrix& ass,
                                         Ordering ordering) {
  const int n = app.rows();
  std::vector<Triplet> t;
  auto put = [&](const SparseMatrix& b, Field rf, Field cf) {
    if (b.rows() != n || b.cols() != n) throw DimensionError("blocks must all be N x N");
    for (int i = 0; i < n; ++i) {
      auto cols = b.row_cols(i);
      auto vals = b.row_values(i);
      for (std::size_t k = 0; k < cols.size(); ++k)
        t.push_back({unknown_index(i, rf, ordering, n), unknown_index(cols[k], cf, ordering, n), vals[k]});
    }
  };
  put(app, Field::Pressure, Field::Pressure);
  put(aps, Field::Pressure, Field::Saturation);
  put(asp, Field::Saturation, Field::Pressure);
  put(ass, Field::Saturation, Field::Saturation);
  return BlockJacobian(SparseMatrix::from_triplets(2 * n, 2 * n, t), ordering, n);
}

namespace {

// Per-cell constitutive values; derivatives are with respect to s_n.
struct CellEval {
  double pc;
  double dpc;
  double mob[2];   // rho * k_r / mu for water, oil
  double dmob[2];
};

CellEval evaluate_cell(const TwoPhaseProblem& pb, double s_n) {
  const double s_w = 1.0 - s_n;
  const auto& fl = pb.fluid();
  const auto kr = relative_permeability(s_w, pb.relperm(), pb.rock(), pb.capillary().epsilon_s);
  CellEval e{};
  e.pc = capillary_pressure(s_w, pb.capillary(), pb.rock());
  e.dpc = -capillary_derivative(s_w, pb.capillary(), pb.rock());
  e.mob[0] = fl.rho_w * kr.k_rw / fl.mu_w;
  e.mob[1] = fl.rho_n * kr.k_rn / fl.mu_n;
  e.dmob[0] = -fl.rho_w * kr.dk_rw / fl.mu_w;
  e.dmob[1] = -fl.rho_n * kr.dk_rn / fl.mu_n;
  return e;
}

void check_inputs(const TwoPhaseProblem& pb, const State& a, const State& b, double dt) {
  const int n = pb.num_cells();
  if (a.num_cells() != n || b.num_cells() != n || static_cast<int>(a.s_n.size()) != n ||
      static_cast<int>(b.s_n.size()) != n)
    throw DimensionError("state size does not match the grid");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("time step must be > 0");
  for (const State* s : {&a, &b})
    for (int c = 0; c < n; ++c)
      if (!std::isfinite(s->p_w[c]) || !std::isfinite(s->s_n[c]))
        throw ValidationError("non-finite state in cell " + std::to_string(c));
}

// Shared residual / Jacobian kernel. When `jac` is non-null, derivative
// entries are appended (including structural zeros, so the pattern depends
// only on the grid).
void assemble(const TwoPhaseProblem& pb, const State& u, const State& old, double dt, Ordering ordering,
              std::vector<double>* res, std::vector<Triplet>* jac) {
  check_inputs(pb, u, old, dt);
  const Grid& grid = pb.grid();
  const FluidProps& fl = pb.fluid();
  const RockProps& rock = pb.rock();
  const int n = grid.num_cells();
  const double volume = grid.cell_volume();
  const double c = dt / volume;
  const double rho[2] = {fl.rho_w, fl.rho_n};
  const auto depth = grid.depth();

  auto row = [&](int cell, int eq) { return unknown_index(cell, static_cast<Field>(eq), ordering, n); };
  auto add_res = [&](int cell, int eq, double v) {
    if (res) (*res)[row(cell, eq)] += v;
  };
  auto add_jac = [&](int cell, int eq, int col_cell, Field f, double v) {
    if (jac) jac->push_back({row(cell, eq), unknown_index(col_cell, f, ordering, n), v});
  };

  if (res) res->assign(2 * n, 0.0);
  if (jac) jac->reserve(8 * n + 16 * grid.faces().size());

  std::vector<CellEval> eval(n);
  for (int i = 0; i < n; ++i) eval[i] = evaluate_cell(pb, u.s_n[i]);

  // Accumulation and sources.
  for (int i = 0; i < n; ++i) {
    const double phi = rock.porosity[i];
    add_res(i, 0, phi * fl.rho_w * ((1.0 - u.s_n[i]) - (1.0 - old.s_n[i])) - dt * pb.sources().q_w[i]);
    add_res(i, 1, phi * fl.rho_n * (u.s_n[i] - old.s_n[i]) - dt * pb.sources().q_n[i]);
    add_jac(i, 0, i, Field::Pressure, 0.0);
    add_jac(i, 0, i, Field::Saturation, -phi * fl.rho_w);
    add_jac(i, 1, i, Field::Pressure, 0.0);
    add_jac(i, 1, i, Field::Saturation, phi * fl.rho_n);
  }

  auto potential = [&](int cell, int phase) {
    double v = u.p_w[cell] - rho[phase] * fl.g * depth[cell];
    if (phase == 1) v += eval[cell].pc;
    return v;
  };

  const auto faces = grid.faces();
  const auto trans = pb.transmissibility();
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const int i = faces[f].cell_i;
    const int j = faces[f].cell_j;
    const double t = trans[f];
    for (int a = 0; a < 2; ++a) {
      const double dphi = potential(i, a) - potential(j, a);
      const int up = upwind_coefficient(i, j, dphi);
      const double mob = eval[up].mob[a];
      const double flux = t * mob * dphi;
      add_res(i, a, c * flux);
      add_res(j, a, -c * flux);
      if (!jac) continue;
      const double dpot_i = a == 1 ? eval[i].dpc : 0.0;
      const double dpot_j = a == 1 ? eval[j].dpc : 0.0;
      const double dfdp_i = t * mob;
      const double dfdp_j = -t * mob;
      double dfds_i = t * mob * dpot_i;
      double dfds_j = -t * mob * dpot_j;
      if (up == i)
        dfds_i += t * eval[i].dmob[a] * dphi;
      else
        dfds_j += t * eval[j].dmob[a] * dphi;
      add_jac(i, a, i, Field::Pressure, c * dfdp_i);
      add_jac(i, a, j, Field::Pressure, c * dfdp_j);
      add_jac(i, a, i, Field::Saturation, c * dfds_i);
      add_jac(i, a, j, Field::Saturation, c * dfds_j);
      add_jac(j, a, i, Field::Pressure, -c * dfdp_i);
      add_jac(j, a, j, Field::Pressure, -c * dfdp_j);
      add_jac(j, a, i, Field::Saturation, -c * dfds_i);
      add_jac(j, a, j, Field::Saturation, -c * dfds_j);
    }
  }

  const auto bfaces = grid.boundary_faces();
  const auto btrans = pb.boundary_transmissibility();
  const auto bcs = pb.boundary();
  for (std::size_t b = 0; b < bfaces.size(); ++b) {
    const int i = bfaces[b].cell;
    if (const auto* dir = std::get_if<DirichletPressureSaturation>(&bcs[b])) {
      const double t = btrans[b];
      const double s_n_b = 1.0 - dir->s_w;
      const CellEval eb = evaluate_cell(pb, s_n_b);
      for (int a = 0; a < 2; ++a) {
        double phi_b = dir->p_w - rho[a] * fl.g * bfaces[b].depth;
        if (a == 1) phi_b += eb.pc;
        const double dphi = potential(i, a) - phi_b;
        const bool from_cell = dphi > 0.0;
        const double mob = from_cell ? eval[i].mob[a] : eb.mob[a];
        add_res(i, a, c * t * mob * dphi);
        if (!jac) continue;
        double dfds = t * mob * (a == 1 ? eval[i].dpc : 0.0);
        if (from_cell) dfds += t * eval[i].dmob[a] * dphi;
        add_jac(i, a, i, Field::Pressure, c * t * mob);
        add_jac(i, a, i, Field::Saturation, c * dfds);
      }
    } else if (const auto* neu = std::get_if<NeumannTotalFlux>(&bcs[b])) {
      const CellEval ein = evaluate_cell(pb, 1.0 - neu->s_w_inflow);
      const double lw = ein.mob[0] / fl.rho_w;
      const double ln = ein.mob[1] / fl.rho_n;
      const double total = lw + ln;
      const double frac_w = total > 0.0 ? lw / total : 1.0;
      add_res(i, 0, -c * fl.rho_w * frac_w * neu->rate);
      add_res(i, 1, -c * fl.rho_n * (1.0 - frac_w) * neu->rate);
    }
  }
}

}  // namespace

std::vector<double> assemble_residual(const TwoPhaseProblem& problem, const State& state_new,
                                      const State& state_old, double dt, Ordering ordering) {
  std::vector<double> res;
  assemble(problem, state_new, state_old, dt, ordering, &res, nullptr);
  return res;
}

BlockJacobian assemble_jacobian(const TwoPhaseProblem& problem, const State& state_new,
                                const State& state_old, double dt, Ordering ordering) {
  std::vector<Triplet> t;
  assemble(problem, state_new, state_old, dt, ordering, nullptr, &t);
  const int n = problem.num_cells();
  return BlockJacobian(SparseMatrix::from_triplets(2 * n, 2 * n, t), ordering, n);
}

PhaseTotals phase_mass(const TwoPhaseProblem& problem, const State& state) {
  const double v = problem.grid().cell_volume();
  PhaseTotals m;
  for (int i = 0; i < problem.num_cells(); ++i) {
    const double phi = problem.rock().porosity[i];
    m.water += v * phi * problem.fluid().rho_w * (1.0 - state.s_n[i]);
    m.oil += v * phi * problem.fluid().rho_n * state.s_n[i];
  }
  return m;
}

PhaseTotals boundary_outflow(const TwoPhaseProblem& problem, const State& state) {
  const Grid& grid = problem.grid();
  const FluidProps& fl = problem.fluid();
  const double rho[2] = {fl.rho_w, fl.rho_n};
  const auto bfaces = grid.boundary_faces();
  const auto btrans = problem.boundary_transmissibility();
  const auto bcs = problem.boundary();
  PhaseTotals out;
  for (std::size_t b = 0; b < bfaces.size(); ++b) {
    const int i = bfaces[b].cell;
    double flux[2] = {0.0, 0.0};
    if (const auto* dir = std::get_if<DirichletPressureSaturation>(&bcs[b])) {
      const CellEval ei = evaluate_cell(problem, state.s_n[i]);
      const CellEval eb = evaluate_cell(problem, 1.0 - dir->s_w);
      for (int a = 0; a < 2; ++a) {
        double phi_i = state.p_w[i] - rho[a] * fl.g * grid.depth()[i];
        double phi_b = dir->p_w - rho[a] * fl.g * bfaces[b].depth;
        if (a == 1) {
          phi_i += ei.pc;
          phi_b += eb.pc;
        }
        const double dphi = phi_i - phi_b;
        flux[a] = btrans[b] * (dphi > 0.0 ? ei.mob[a] : eb.mob[a]) * dphi;
      }
    } else if (const auto* neu = std::get_if<NeumannTotalFlux>(&bcs[b])) {
      const CellEval ein = evaluate_cell(problem, 1.0 - neu->s_w_inflow);
      const double lw = ein.mob[0] / fl.rho_w;
      const double ln = ein.mob[1] / fl.rho_n;
      const double frac_w = lw + ln > 0.0 ? lw / (lw + ln) : 1.0;
      flux[0] = -fl.rho_w * frac_w * neu->rate;
      flux[1] = -fl.rho_n * (1.0 - frac_w) * neu->rate;
    }
    out.water += flux[0];
    out.oil += flux[1];
  }
  return out;
}

PhaseTotals source_rate(const TwoPhaseProblem& problem) {
  const double v = problem.grid().cell_volume();
  PhaseTotals s;
  for (int i = 0; i < problem.num_cells(); ++i) {
    s.water += v * problem.sources().q_w[i];
    s.oil += v * problem.sources().q_n[i];
  }
  return s;
}

}  // namespace twophase
