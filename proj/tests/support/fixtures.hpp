#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "twophase/discretize.hpp"
#include "twophase/sparse.hpp"
#include "twophase/spe10.hpp"

namespace fixtures {

using namespace twophase;

inline SparseMatrix poisson_1d(int n) {
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    t.push_back({i, i, 2.0});
    if (i > 0) t.push_back({i, i - 1, -1.0});
    if (i + 1 < n) t.push_back({i, i + 1, -1.0});
  }
  return SparseMatrix::from_triplets(n, n, t);
}

inline SparseMatrix poisson_2d(int m) {
  std::vector<Triplet> t;
  auto id = [m](int i, int j) { return i + m * j; };
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      t.push_back({id(i, j), id(i, j), 4.0});
      if (i > 0) t.push_back({id(i, j), id(i - 1, j), -1.0});
      if (i + 1 < m) t.push_back({id(i, j), id(i + 1, j), -1.0});
      if (j > 0) t.push_back({id(i, j), id(i, j - 1), -1.0});
      if (j + 1 < m) t.push_back({id(i, j), id(i, j + 1), -1.0});
    }
  return SparseMatrix::from_triplets(m * m, m * m, t);
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

inline double max_abs(const Eigen::MatrixXd& a) { return a.cwiseAbs().maxCoeff(); }

inline std::vector<double> test_vector(int n, double phase = 0.3) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = std::sin(1.7 * i + phase) + 0.1 * i / n;
  return v;
}

/// Vertical cross-section with heterogeneous permeability, a Neumann
/// inlet at the lower left and a Dirichlet outlet at the upper right.
inline TwoPhaseProblem cross_section(int nx, int nz, CapillaryModel capillary,
                                     RelPermModel relperm = QuadraticRelPerm{}) {
  Grid grid(nx, 1, nz, 0.5 * nx, 1.0, 0.5 * nz, Axis::Z);
  RockProps rock = RockProps::uniform(grid.num_cells(), 0.2, 0.0);
  const auto k = lognormal_field(grid.num_cells(), 500 * units::millidarcy, 0.8, 11);
  for (int c = 0; c < grid.num_cells(); ++c) rock.perm[c] = {k[c], k[c], 0.5 * k[c]};
  std::vector<BoundaryCondition> bc(grid.boundary_faces().size(), NoFlow{});
  for (std::size_t f = 0; f < bc.size(); ++f) {
    const auto& face = grid.boundary_faces()[f];
    const auto ijk = grid.ijk(face.cell);
    if (face.side == Side::XMin && ijk[2] == nz - 1) bc[f] = NeumannTotalFlux{0.05 / units::day, 1.0};
    if (face.side == Side::XMax && ijk[2] == 0) bc[f] = DirichletPressureSaturation{1e5, 0.2};
  }
  return TwoPhaseProblem(std::move(grid), std::move(rock), FluidProps{}, capillary, relperm, std::move(bc));
}

/// Non-uniform state around (p0, s_n = 0.8) so every block of the Jacobian
/// carries varied entries.
inline State perturbed_state(const TwoPhaseProblem& problem, double p0 = 1e5) {
  State s = State::uniform(problem.num_cells(), p0, 0.8);
  for (int c = 0; c < problem.num_cells(); ++c) {
    s.p_w[c] += 2e3 * std::sin(0.9 * c) + 15.0 * c;
    s.s_n[c] = 0.55 + 0.3 * std::cos(1.3 * c + 0.2) * 0.5 + 0.1 * std::sin(0.4 * c);
  }
  return s;
}

}  // namespace fixtures
