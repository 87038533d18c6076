#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace twophase {

enum class Axis : int { X = 0, Y = 1, Z = 2 };
enum class Side : int { XMin = 0, XMax, YMin, YMax, ZMin, ZMax };

std::string_view to_string(Axis axis);
std::string_view to_string(Side side);
std::optional<Axis> parse_axis(std::string_view s);
std::optional<Side> parse_side(std::string_view s);

struct Face {
  int cell_i;
  int cell_j;       // cell_j > cell_i
  double area;      // m^2
  double distance;  // center-to-center distance, m
  Axis axis;
};

struct BoundaryFace {
  int cell;
  double area;           // m^2
  double half_distance;  // cell center to face center, m
  double depth;          // depth of the face center, m
  Axis axis;
  Side side;
};

/// Uniform Cartesian grid. Cells are numbered x-fastest, then y, then z.
/// When a gravity axis is given, depth equals the cell-center coordinate
/// along it, so the index along that axis increases downward.
class Grid {
 public:
  Grid(int nx, int ny, int nz, double lx, double ly, double lz,
       std::optional<Axis> gravity_axis = std::nullopt);

  int nx() const { return n_[0]; }
  int ny() const { return n_[1]; }
  int nz() const { return n_[2]; }
  int num_cells() const { return n_[0] * n_[1] * n_[2]; }
  double length(Axis a) const { return l_[static_cast<int>(a)]; }
  double spacing(Axis a) const { return h_[static_cast<int>(a)]; }
  double dx() const { return h_[0]; }
  double dy() const { return h_[1]; }
  double dz() const { return h_[2]; }
  double cell_volume() const { return h_[0] * h_[1] * h_[2]; }
  std::optional<Axis> gravity_axis() const { return gravity_axis_; }

  int index(int i, int j, int k) const { return i + n_[0] * (j + n_[1] * k); }
  std::array<int, 3> ijk(int cell) const;
  std::array<double, 3> center(int cell) const;

  std::span<const double> depth() const { return depth_; }
  std::span<const Face> faces() const { return faces_; }
  std::span<const BoundaryFace> boundary_faces() const { return boundary_faces_; }

 private:
  std::array<int, 3> n_;
  std::array<double, 3> l_;
  std::array<double, 3> h_;
  std::optional<Axis> gravity_axis_;
  std::vector<double> depth_;
  std::vector<Face> faces_;
  std::vector<BoundaryFace> boundary_faces_;
};

inline Grid build_grid(int nx, int ny, int nz, double lx, double ly, double lz,
                       std::optional<Axis> gravity_axis = std::nullopt) {
  return Grid(nx, ny, nz, lx, ly, lz, gravity_axis);
}

/// Closed-form interior face count of an nx x ny x nz grid.
constexpr long interior_face_count(long nx, long ny, long nz) {
  return (nx - 1) * ny * nz + nx * (ny - 1) * nz + nx * ny * (nz - 1);
}

/// Distance-weighted harmonic mean of two cell permeabilities across a face;
/// 0 when either side is impermeable.
double harmonic_face_permeability(double k_i, double k_j, double dx_i, double dx_j);

}  // namespace twophase
