#pragma once

#include <array>
#include <variant>
#include <vector>

namespace twophase {

namespace units {
inline constexpr double millidarcy = 9.869233e-16;  // m^2
inline constexpr double centipoise = 1e-3;          // Pa s
inline constexpr double day = 86400.0;              // s
}  // namespace units

struct FluidProps {
  double rho_w = 1000.0;  // kg/m^3
  double rho_n = 700.0;
  double mu_w = 1e-3;  // Pa s
  double mu_n = 1e-2;
  double g = 9.80665;  // m/s^2

  /// Throws ValidationError unless densities and viscosities are > 0 and g >= 0.
  void validate() const;
  bool operator==(const FluidProps&) const = default;
};

/// Per-cell porosity and diagonal permeability (kx, ky, kz) plus residual
/// saturations shared by all cells.
struct RockProps {
  std::vector<double> porosity;
  std::vector<std::array<double, 3>> perm;  // m^2
  double s_wr = 0.0;
  double s_nr = 0.0;

  static RockProps uniform(int cells, double porosity, double perm, double s_wr = 0.0, double s_nr = 0.0);
  void validate() const;
  int num_cells() const { return static_cast<int>(porosity.size()); }
  bool operator==(const RockProps&) const = default;
};

inline constexpr double kDefaultSaturationFloor = 1e-3;

struct LinearCapillary {
  double p0;  // Pa
  bool operator==(const LinearCapillary&) const = default;
};

struct BrooksCoreyCapillary {
  double pd;  // entry pressure, Pa
  double lambda;
  bool operator==(const BrooksCoreyCapillary&) const = default;
};

struct CapillaryModel {
  std::variant<LinearCapillary, BrooksCoreyCapillary> law = LinearCapillary{0.0};
  double epsilon_s = kDefaultSaturationFloor;

  void validate() const;
  bool operator==(const CapillaryModel&) const = default;
};

struct QuadraticRelPerm {
  bool operator==(const QuadraticRelPerm&) const = default;
};

struct CoreyRelPerm {
  double lambda;
  bool operator==(const CoreyRelPerm&) const = default;
};

using RelPermModel = std::variant<QuadraticRelPerm, CoreyRelPerm>;

/// Effective wetting saturation and its derivative with respect to s_w.
/// The derivative is zero where the clamp is active.
struct EffectiveSaturation {
  double value;
  double derivative;
};

EffectiveSaturation effective_saturation(double s_w, const RockProps& rock,
                                         double epsilon_s = kDefaultSaturationFloor);

/// P_c = P_n - P_w as a function of wetting saturation.
double capillary_pressure(double s_w, const CapillaryModel& model, const RockProps& rock);

/// dP_c/ds_w on the clamped branch (zero where the clamp is active).
double capillary_derivative(double s_w, const CapillaryModel& model, const RockProps& rock);

struct RelativePermeability {
  double k_rw;
  double k_rn;
  double dk_rw;  // derivatives with respect to s_w
  double dk_rn;
};

RelativePermeability relative_permeability(double s_w, const RelPermModel& model, const RockProps& rock,
                                           double epsilon_s = kDefaultSaturationFloor);

/// Donor-cell selection: value_i when the flux indicator is positive
/// (flow from i to j), value_j otherwise.
template <typename T>
constexpr const T& upwind_coefficient(const T& value_i, const T& value_j, double flux_indicator) {
  return flux_indicator > 0.0 ? value_i : value_j;
}

inline double mobility(double k_r, double mu) { return k_r / mu; }

}  // namespace twophase
