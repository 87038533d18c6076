#include "twophase/grid.hpp"

#include <cmath>

#include "twophase/errors.hpp"

namespace twophase {

std::string_view to_string(Axis axis) {
  switch (axis) {
    case Axis::X: return "x";
    case Axis::Y: return "y";
    case Axis::Z: return "z";
  }
  return "?";
}

std::string_view to_string(Side side) {
  static constexpr std::string_view names[] = {"xmin", "xmax", "ymin", "ymax", "zmin", "zmax"};
  return names[static_cast<int>(side)];
}

std::optional<Axis> parse_axis(std::string_view s) {
  if (s == "x") return Axis::X;
  if (s == "y") return Axis::Y;
  if (s == "z") return Axis::Z;
  return std::nullopt;
}

std::optional<Side> parse_side(std::string_view s) {
  for (int k = 0; k < 6; ++k)
    if (to_string(static_cast<Side>(k)) == s) return static_cast<Side>(k);
  return std::nullopt;
}

Grid::Grid(int nx, int ny, int nz, double lx, double ly, double lz, std::optional<Axis> gravity_axis)
    : n_{nx, ny, nz}, l_{lx, ly, lz}, gravity_axis_(gravity_axis) {
  for (int a = 0; a < 3; ++a) {
    if (n_[a] < 1) throw ValidationError("grid: cell counts must be >= 1");
    if (!(l_[a] > 0.0) || !std::isfinite(l_[a])) throw ValidationError("grid: lengths must be > 0");
    h_[a] = l_[a] / n_[a];
  }

  const int n = num_cells();
  depth_.assign(n, 0.0);
  if (gravity_axis_) {
    const int g = static_cast<int>(*gravity_axis_);
    for (int c = 0; c < n; ++c) depth_[c] = (ijk(c)[g] + 0.5) * h_[g];
  }

  faces_.reserve(static_cast<std::size_t>(interior_face_count(nx, ny, nz)));
  const double area[3] = {h_[1] * h_[2], h_[0] * h_[2], h_[0] * h_[1]};
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const int c = index(i, j, k);
        if (i + 1 < nx) faces_.push_back({c, index(i + 1, j, k), area[0], h_[0], Axis::X});
        if (j + 1 < ny) faces_.push_back({c, index(i, j + 1, k), area[1], h_[1], Axis::Y});
        if (k + 1 < nz) faces_.push_back({c, index(i, j, k + 1), area[2], h_[2], Axis::Z});
      }

  auto face_depth = [&](int c, int axis, int dir) {
    if (!gravity_axis_ || static_cast<int>(*gravity_axis_) != axis) return depth_[c];
    return depth_[c] + dir * 0.5 * h_[axis];
  };
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const int c = index(i, j, k);
        const int idx[3] = {i, j, k};
        for (int a = 0; a < 3; ++a) {
          const Axis axis = static_cast<Axis>(a);
          if (idx[a] == 0)
            boundary_faces_.push_back({c, area[a], 0.5 * h_[a], face_depth(c, a, -1), axis,
                                       static_cast<Side>(2 * a)});
          if (idx[a] == n_[a] - 1)
            boundary_faces_.push_back({c, area[a], 0.5 * h_[a], face_depth(c, a, +1), axis,
                                       static_cast<Side>(2 * a + 1)});
        }
      }
}

std::array<int, 3> Grid::ijk(int cell) const {
  const int i = cell % n_[0];
  const int j = (cell / n_[0]) % n_[1];
  const int k = cell / (n_[0] * n_[1]);
  return {i, j, k};
}

std::array<double, 3> Grid::center(int cell) const {
  const auto c = ijk(cell);
  return {(c[0] + 0.5) * h_[0], (c[1] + 0.5) * h_[1], (c[2] + 0.5) * h_[2]};
}

double harmonic_face_permeability(double k_i, double k_j, double dx_i, double dx_j) {
  const double denom = dx_i * k_j + dx_j * k_i;
  if (k_i == 0.0 || k_j == 0.0 || denom == 0.0) return 0.0;
  return (dx_i + dx_j) * k_i * k_j / denom;
}

}  // namespace twophase
