#include "twophase/rockfluid.hpp"

#include <algorithm>
#include <cmath>

#include "twophase/errors.hpp"

namespace twophase {

void FluidProps::validate() const {
  if (!(rho_w > 0.0 && rho_n > 0.0)) throw ValidationError("fluid densities must be > 0");
  if (!(mu_w > 0.0 && mu_n > 0.0)) throw ValidationError("fluid viscosities must be > 0");
  if (!(g >= 0.0)) throw ValidationError("gravitational acceleration must be >= 0");
}

RockProps RockProps::uniform(int cells, double porosity, double perm, double s_wr, double s_nr) {
  RockProps r;
  r.porosity.assign(cells, porosity);
  r.perm.assign(cells, {perm, perm, perm});
  r.s_wr = s_wr;
  r.s_nr = s_nr;
  return r;
}

void RockProps::validate() const {
  if (perm.size() != porosity.size()) throw ValidationError("rock: porosity and permeability sizes differ");
  for (std::size_t c = 0; c < porosity.size(); ++c) {
    if (!(porosity[c] > 0.0 && porosity[c] <= 1.0))
      throw ValidationError("rock: porosity out of (0,1] in cell " + std::to_string(c));
    for (double k : perm[c])
      if (!(k >= 0.0) || !std::isfinite(k))
        throw ValidationError("rock: negative permeability in cell " + std::to_string(c));
  }
  if (!(s_wr >= 0.0 && s_nr >= 0.0 && s_wr + s_nr < 1.0))
    throw ValidationError("rock: residual saturations must satisfy 0 <= s_wr + s_nr < 1");
}

void CapillaryModel::validate() const {
  if (!(epsilon_s > 0.0 && epsilon_s < 0.5)) throw ValidationError("capillary: epsilon_s must be in (0, 0.5)");
  if (const auto* lin = std::get_if<LinearCapillary>(&law)) {
    if (!(lin->p0 >= 0.0)) throw ValidationError("capillary: P0 must be >= 0");
  } else {
    const auto& bc = std::get<BrooksCoreyCapillary>(law);
    if (!(bc.pd > 0.0)) throw ValidationError("capillary: Brooks-Corey entry pressure must be > 0");
    if (!(bc.lambda > 0.0)) throw ValidationError("capillary: Brooks-Corey lambda must be > 0");
  }
}

EffectiveSaturation effective_saturation(double s_w, const RockProps& rock, double epsilon_s) {
  const double span = 1.0 - rock.s_wr - rock.s_nr;
  const double raw = (s_w - rock.s_wr) / span;
  if (raw < epsilon_s) return {epsilon_s, 0.0};
  if (raw > 1.0) return {1.0, 0.0};
  return {raw, 1.0 / span};
}

double capillary_pressure(double s_w, const CapillaryModel& model, const RockProps& rock) {
  const double s = effective_saturation(s_w, rock, model.epsilon_s).value;
  if (const auto* lin = std::get_if<LinearCapillary>(&model.law)) return lin->p0 * (1.0 - s);
  const auto& bc = std::get<BrooksCoreyCapillary>(model.law);
  return bc.pd * std::pow(s, -1.0 / bc.lambda);
}

double capillary_derivative(double s_w, const CapillaryModel& model, const RockProps& rock) {
  const auto eff = effective_saturation(s_w, rock, model.epsilon_s);
  if (eff.derivative == 0.0) return 0.0;
  if (const auto* lin = std::get_if<LinearCapillary>(&model.law)) return -lin->p0 * eff.derivative;
  const auto& bc = std::get<BrooksCoreyCapillary>(model.law);
  return -bc.pd / bc.lambda * std::pow(eff.value, -1.0 / bc.lambda - 1.0) * eff.derivative;
}

RelativePermeability relative_permeability(double s_w, const RelPermModel& model, const RockProps& rock,
                                           double epsilon_s) {
  const auto eff = effective_saturation(s_w, rock, epsilon_s);
  const double s = eff.value;
  const double ds = eff.derivative;
  RelativePermeability kr{};
  if (std::holds_alternative<QuadraticRelPerm>(model)) {
    kr.k_rw = s * s;
    kr.k_rn = (1.0 - s) * (1.0 - s);
    kr.dk_rw = 2.0 * s * ds;
    kr.dk_rn = -2.0 * (1.0 - s) * ds;
    return kr;
  }
  const double lambda = std::get<CoreyRelPerm>(model).lambda;
  const double ew = (2.0 + 3.0 * lambda) / lambda;
  const double en = (2.0 + lambda) / lambda;
  const double sen = std::pow(s, en);
  kr.k_rw = std::pow(s, ew);
  kr.k_rn = (1.0 - s) * (1.0 - s) * (1.0 - sen);
  kr.dk_rw = ew * std::pow(s, ew - 1.0) * ds;
  kr.dk_rn = (-2.0 * (1.0 - s) * (1.0 - sen) - (1.0 - s) * (1.0 - s) * en * std::pow(s, en - 1.0)) * ds;
  return kr;
}

}  // namespace twophase
