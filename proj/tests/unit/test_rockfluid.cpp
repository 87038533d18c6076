#include <doctest.h>

#include "fixtures.hpp"
#include "twophase/errors.hpp"
#include "twophase/rockfluid.hpp"

using namespace twophase;

namespace {

RockProps rock_with(double s_wr, double s_nr) { return RockProps::uniform(1, 0.2, 1e-13, s_wr, s_nr); }

const CapillaryModel kLinear{LinearCapillary{1e5}};
const CapillaryModel kBrooksCorey{BrooksCoreyCapillary{1e5, 2.5}};

}  // namespace

TEST_CASE("effective saturation") {
  const RockProps r = rock_with(0, 0);
  CHECK(effective_saturation(1.0, r).value == 1.0);
  CHECK(effective_saturation(0.2, r).value == doctest::Approx(0.2));
  CHECK(effective_saturation(-0.05, r).value == kDefaultSaturationFloor);
  CHECK(effective_saturation(-0.05, r).derivative == 0.0);
  CHECK(effective_saturation(1.3, r).value == 1.0);
  const RockProps rr = rock_with(0.1, 0.2);
  CHECK(effective_saturation(0.45, rr).value == doctest::Approx(0.5));
  CHECK(effective_saturation(0.45, rr).derivative == doctest::Approx(1.0 / 0.7));
}

TEST_CASE("capillary pressure values") {
  const RockProps r = rock_with(0, 0);
  CHECK(capillary_pressure(1.0, kLinear, r) == 0.0);
  CHECK(capillary_pressure(0.25, kLinear, r) == doctest::Approx(0.75e5));
  CHECK(capillary_pressure(1.0, kBrooksCorey, r) == doctest::Approx(1e5));
  CHECK(capillary_pressure(0.5, kBrooksCorey, r) == doctest::Approx(1e5 * std::pow(2.0, 0.4)));
  CHECK(capillary_pressure(0.5, kBrooksCorey, r) == doctest::Approx(1.3195e5).epsilon(1e-4));
}

TEST_CASE("linear capillary derivative includes the chain factor") {
  for (auto [swr, snr] : {std::pair{0.0, 0.0}, std::pair{0.1, 0.2}}) {
    const RockProps r = rock_with(swr, snr);
    for (double s : {0.35, 0.5, 0.65})
      CHECK(capillary_derivative(s, kLinear, r) == doctest::Approx(-1e5 / (1 - swr - snr)));
  }
}

TEST_CASE("capillary derivative is zero on the clamp") {
  const RockProps r = rock_with(0, 0);
  for (const auto& m : {kLinear, kBrooksCorey}) {
    CHECK(capillary_derivative(-0.1, m, r) == 0.0);
    CHECK(capillary_derivative(1.2, m, r) == 0.0);
  }
}

TEST_CASE("capillary derivative matches centered differences") {
  const RockProps r = rock_with(0.05, 0.1);
  const double h = 1e-7;
  for (const auto& m : {kLinear, kBrooksCorey, CapillaryModel{BrooksCoreyCapillary{2e4, 0.7}}}) {
    for (double s = 0.1; s < 0.85; s += 0.05) {
      const double fd = (capillary_pressure(s + h, m, r) - capillary_pressure(s - h, m, r)) / (2 * h);
      CHECK(fixtures::rel_diff(capillary_derivative(s, m, r), fd) <= 1e-6);
    }
  }
}

TEST_CASE("capillary pressure is non-increasing in s_w") {
  const RockProps r = rock_with(0.1, 0.05);
  for (const auto& m : {kLinear, kBrooksCorey}) {
    double prev = capillary_pressure(-0.2, m, r);
    for (double s = -0.2; s <= 1.2; s += 0.01) {
      const double pc = capillary_pressure(s, m, r);
      CHECK(pc <= prev);
      CHECK(std::isfinite(pc));
      prev = pc;
    }
  }
}

TEST_CASE("relative permeability endpoints") {
  const RockProps r = rock_with(0, 0);
  for (const RelPermModel& m : {RelPermModel{QuadraticRelPerm{}}, RelPermModel{CoreyRelPerm{2.5}}}) {
    const auto one = relative_permeability(1.0, m, r);
    CHECK(one.k_rw == 1.0);
    CHECK(one.k_rn == 0.0);
    const auto zero = relative_permeability(0.0, m, r);
    CHECK(zero.k_rw < 1e-5);
    CHECK(zero.k_rn > 0.99);
  }
  const auto half = relative_permeability(0.5, QuadraticRelPerm{}, r);
  CHECK(half.k_rw == doctest::Approx(0.25));
  CHECK(half.k_rn == doctest::Approx(0.25));
  const auto corey = relative_permeability(0.5, CoreyRelPerm{2.0}, r);
  CHECK(corey.k_rw == doctest::Approx(std::pow(0.5, 4.0)));
  CHECK(corey.k_rn == doctest::Approx(0.25 * (1 - std::pow(0.5, 2.0))));
}

TEST_CASE("relative permeability is bounded, monotone and differentiable") {
  const RockProps r = rock_with(0.1, 0.1);
  const double h = 1e-7;
  for (const RelPermModel& m : {RelPermModel{QuadraticRelPerm{}}, RelPermModel{CoreyRelPerm{1.5}}}) {
    auto prev = relative_permeability(-0.1, m, r);
    for (double s = -0.1; s <= 1.1; s += 0.01) {
      const auto k = relative_permeability(s, m, r);
      CHECK(k.k_rw >= 0.0);
      CHECK(k.k_rw <= 1.0);
      CHECK(k.k_rn >= 0.0);
      CHECK(k.k_rn <= 1.0);
      CHECK(k.k_rw >= prev.k_rw);
      CHECK(k.k_rn <= prev.k_rn);
      CHECK(mobility(k.k_rw, 1e-3) >= 0.0);
      prev = k;
    }
    for (double s = 0.2; s < 0.85; s += 0.05) {
      const auto up = relative_permeability(s + h, m, r), dn = relative_permeability(s - h, m, r);
      const auto k = relative_permeability(s, m, r);
      CHECK(k.dk_rw == doctest::Approx((up.k_rw - dn.k_rw) / (2 * h)).epsilon(1e-6));
      CHECK(k.dk_rn == doctest::Approx((up.k_rn - dn.k_rn) / (2 * h)).epsilon(1e-6));
    }
  }
}

TEST_CASE("upwind selection") {
  CHECK(upwind_coefficient(1.0, 2.0, +1.0) == 1.0);
  CHECK(upwind_coefficient(1.0, 2.0, -1.0) == 2.0);
  CHECK(upwind_coefficient(1.0, 2.0, 0.0) == 2.0);
  CHECK(upwind_coefficient(1.0, 2.0, -0.0) == 2.0);
}

TEST_CASE("property validation") {
  FluidProps f;
  CHECK_NOTHROW(f.validate());
  f.mu_n = -1e-3;
  CHECK_THROWS_AS(f.validate(), ValidationError);
  f = FluidProps{};
  f.g = -1;
  CHECK_THROWS_AS(f.validate(), ValidationError);

  RockProps r = RockProps::uniform(3, 0.2, 1e-13);
  CHECK_NOTHROW(r.validate());
  r.porosity[1] = 0.0;
  CHECK_THROWS_AS(r.validate(), ValidationError);
  r = RockProps::uniform(3, 0.2, 1e-13, 0.5, 0.5);
  CHECK_THROWS_AS(r.validate(), ValidationError);
  r = RockProps::uniform(3, 0.2, 1e-13);
  r.perm[2][1] = -1;
  CHECK_THROWS_AS(r.validate(), ValidationError);

  CHECK_THROWS_AS((CapillaryModel{BrooksCoreyCapillary{0.0, 2.0}}.validate()), ValidationError);
  CHECK_THROWS_AS((CapillaryModel{BrooksCoreyCapillary{1e5, -2.0}}.validate()), ValidationError);
  CHECK_THROWS_AS((CapillaryModel{LinearCapillary{1e5}, 0.0}.validate()), ValidationError);
}
