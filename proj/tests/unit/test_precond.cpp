#include <doctest.h>

#include "fixtures.hpp"
#include "twophase/errors.hpp"
#include "twophase/gmres.hpp"
#include "twophase/precond.hpp"

using namespace twophase;

namespace {

const CapillaryModel kLinear{LinearCapillary{1e5}};

BlockJacobian sample_jacobian(int nx, int nz, Ordering ordering) {
  const TwoPhaseProblem pb = fixtures::cross_section(nx, nz, kLinear);
  const State old = State::uniform(pb.num_cells(), 1e5, 0.8);
  return assemble_jacobian(pb, fixtures::perturbed_state(pb), old, 5 * units::day, ordering);
}

Eigen::MatrixXd restriction(const FieldRestriction& r, Field f) { return to_dense(r.matrix(f)); }

double rel_max(const Eigen::MatrixXd& a, const Eigen::MatrixXd& ref) {
  return fixtures::max_abs(a - ref) / fixtures::max_abs(ref);
}

// Dense [[S, A_ps], [0, A_ss]]^{-1} in the Jacobian's ordering.
Eigen::MatrixXd dense_bf_inverse(const BlockJacobian& jac) {
  const FieldRestriction r(jac.num_cells(), jac.ordering());
  const Eigen::MatrixXd rp = restriction(r, Field::Pressure), rs = restriction(r, Field::Saturation);
  const Eigen::MatrixXd s = to_dense(build_simple_schur(jac));
  const Eigen::MatrixXd upper = rp.transpose() * s * rp + rp.transpose() * to_dense(jac.a_ps()) * rs +
                                rs.transpose() * to_dense(jac.a_ss()) * rs;
  return upper.inverse();
}

PreconditionerSpec exact_spec(PreconditionerKind kind, Ordering ilu) {
  PreconditionerSpec spec;
  spec.kind = kind;
  spec.inner = InnerSolve::Exact;
  spec.ilu_ordering = ilu;
  return spec;
}

}  // namespace

TEST_CASE("field restrictions partition the unknowns") {
  for (Ordering o : {Ordering::VariableBlocked, Ordering::PointInterleaved}) {
    const FieldRestriction r(5, o);
    const Eigen::MatrixXd rp = restriction(r, Field::Pressure), rs = restriction(r, Field::Saturation);
    CHECK(fixtures::max_abs(rp * rp.transpose() - Eigen::MatrixXd::Identity(5, 5)) == 0.0);
    CHECK(fixtures::max_abs(rp * rs.transpose()) == 0.0);
    CHECK(fixtures::max_abs(rp.transpose() * rp + rs.transpose() * rs - Eigen::MatrixXd::Identity(10, 10)) == 0.0);
    const auto u = fixtures::test_vector(10);
    std::vector<double> p(5), back(10, 0.0);
    r.restrict_to(Field::Pressure, u, p);
    for (int c = 0; c < 5; ++c) CHECK(p[c] == u[unknown_index(c, Field::Pressure, o, 5)]);
    r.prolong_add(Field::Pressure, p, back);
    r.restrict_to(Field::Saturation, u, p);
    r.prolong_add(Field::Saturation, p, back);
    CHECK(back == u);
  }
}

TEST_CASE("Schur complement on a one-cell toy") {
  const auto one = [](double v) { return SparseMatrix::diagonal(std::vector<double>{v}); };
  const BlockJacobian jac = BlockJacobian::from_blocks(one(2), one(1), one(1), one(4), Ordering::VariableBlocked);
  const SparseMatrix s = build_simple_schur(jac);
  CHECK(s.coeff(0, 0) == doctest::Approx(1.75));
  const BlockJacobian printed =
      BlockJacobian::from_blocks(one(2), one(1), one(3), one(4), Ordering::VariableBlocked);
  CHECK(build_simple_schur(printed, true).coeff(0, 0) == doctest::Approx(2 - 1 * 0.25 * 2));
  CHECK(build_simple_schur(printed).coeff(0, 0) == doctest::Approx(2 - 1 * 0.25 * 3));
}

TEST_CASE("Schur complement limits") {
  const BlockJacobian jac = sample_jacobian(3, 3, Ordering::VariableBlocked);
  const int n = jac.num_cells();
  const SparseMatrix zero(n, n, std::vector<int>(n + 1, 0), {}, {});

  const BlockJacobian decoupled = BlockJacobian::from_blocks(jac.a_pp(), zero, jac.a_sp(), jac.a_ss(),
                                                             Ordering::VariableBlocked);
  CHECK(fixtures::max_abs(to_dense(build_simple_schur(decoupled)) - to_dense(jac.a_pp())) == 0.0);

  const SparseMatrix diag_ss = SparseMatrix::diagonal(jac.a_ss().diagonal_values());
  const BlockJacobian diag = BlockJacobian::from_blocks(jac.a_pp(), jac.a_ps(), jac.a_sp(), diag_ss,
                                                        Ordering::PointInterleaved);
  const Eigen::MatrixXd exact = to_dense(jac.a_pp()) -
                                to_dense(jac.a_ps()) * to_dense(diag_ss).inverse() * to_dense(jac.a_sp());
  CHECK(rel_max(to_dense(build_simple_schur(diag)), exact) <= 1e-12);

  std::vector<double> d = jac.a_ss().diagonal_values();
  d[4] = 0.0;
  const BlockJacobian singular = BlockJacobian::from_blocks(jac.a_pp(), jac.a_ps(), jac.a_sp(),
                                                            SparseMatrix::diagonal(d), Ordering::VariableBlocked);
  try {
    build_simple_schur(singular);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("4") != std::string::npos);
  }
}

TEST_CASE("CPR-AMG(1) with exact inner solves matches its dense form") {
  for (Ordering o : {Ordering::VariableBlocked, Ordering::PointInterleaved}) {
    const BlockJacobian jac = sample_jacobian(4, 4, o);
    const auto m = make_preconditioner(jac, exact_spec(PreconditionerKind::CprAmg1, Ordering::PointInterleaved));
    const FieldRestriction r(jac.num_cells(), o);
    const Eigen::MatrixXd j = to_dense(jac.coupled());
    const Eigen::MatrixXd p1 = materialize(*make_ilu_stage(jac, Ordering::PointInterleaved));
    const Eigen::MatrixXd rp = restriction(r, Field::Pressure);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(j.rows(), j.cols());
    const Eigen::MatrixXd ref = p1 + rp.transpose() * to_dense(jac.a_pp()).inverse() * rp * (id - j * p1);
    CHECK(rel_max(materialize(*m), ref) <= 1e-12);
  }
}

TEST_CASE("CPR-AMG(2) with exact inner solves matches its dense form") {
  for (Ordering o : {Ordering::VariableBlocked, Ordering::PointInterleaved}) {
    const BlockJacobian jac = sample_jacobian(4, 4, o);
    const auto m = make_preconditioner(jac, exact_spec(PreconditionerKind::CprAmg2, Ordering::VariableBlocked));
    const FieldRestriction r(jac.num_cells(), o);
    const Eigen::MatrixXd j = to_dense(jac.coupled());
    const Eigen::MatrixXd p1 = materialize(*make_ilu_stage(jac, Ordering::VariableBlocked));
    const Eigen::MatrixXd rp = restriction(r, Field::Pressure), rs = restriction(r, Field::Saturation);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(j.rows(), j.cols());
    const Eigen::MatrixXd corr = rp.transpose() * to_dense(jac.a_pp()).inverse() * rp +
                                 rs.transpose() * to_dense(jac.a_ss()).inverse() * rs;
    CHECK(rel_max(materialize(*m), p1 + corr * (id - j * p1)) <= 1e-12);
  }
}

TEST_CASE("block factorization with exact inner solves matches its dense form") {
  for (Ordering o : {Ordering::VariableBlocked, Ordering::PointInterleaved}) {
    const BlockJacobian jac = sample_jacobian(4, 4, o);
    const auto m = make_preconditioner(jac, exact_spec(PreconditionerKind::BlockFactorization, o));
    CHECK(rel_max(materialize(*m), dense_bf_inverse(jac)) <= 1e-12);
  }
}

TEST_CASE("ILU stage is the same operator in either factorization ordering up to the permutation") {
  const BlockJacobian jac = sample_jacobian(3, 3, Ordering::VariableBlocked);
  const auto stage = make_ilu_stage(jac, Ordering::PointInterleaved);
  const Ilu0 direct(jac.reordered(Ordering::PointInterleaved).coupled());
  const auto perm = ordering_permutation(9, Ordering::VariableBlocked, Ordering::PointInterleaved);
  const auto r = fixtures::test_vector(18);
  std::vector<double> rp(18);
  for (int i = 0; i < 18; ++i) rp[perm[i]] = r[i];
  const auto yp = direct(rp);
  const auto y = (*stage)(r);
  for (int i = 0; i < 18; ++i) CHECK(y[i] == doctest::Approx(yp[perm[i]]).epsilon(1e-14));
}

TEST_CASE("an exact first stage makes CPR-AMG(1) an exact inverse") {
  const BlockJacobian jac = sample_jacobian(3, 4, Ordering::VariableBlocked);
  const FieldRestriction r(jac.num_cells(), jac.ordering());
  const CombinativeCpr m(jac.coupled(), r, std::make_unique<DenseDirectSolve>(jac.coupled()),
                         std::make_unique<DenseDirectSolve>(jac.a_pp()));
  const Eigen::MatrixXd jinv = to_dense(jac.coupled()).inverse();
  CHECK(rel_max(materialize(m), jinv) <= 1e-9);
}

TEST_CASE("CPR-AMG(2) is exact on a block-diagonal Jacobian") {
  const BlockJacobian jac = sample_jacobian(3, 3, Ordering::VariableBlocked);
  const int n = jac.num_cells();
  const SparseMatrix zero(n, n, std::vector<int>(n + 1, 0), {}, {});
  const BlockJacobian bd =
      BlockJacobian::from_blocks(jac.a_pp(), zero, zero, jac.a_ss(), Ordering::VariableBlocked);
  const FieldRestriction r(n, Ordering::VariableBlocked);
  const AdditiveCpr m(bd.coupled(), r, std::make_unique<DenseDirectSolve>(bd.coupled()),
                      std::make_unique<DenseDirectSolve>(bd.a_pp()), std::make_unique<DenseDirectSolve>(bd.a_ss()));
  CHECK(rel_max(materialize(m), to_dense(bd.coupled()).inverse()) <= 1e-9);
}

TEST_CASE("every preconditioner maps zero to zero and is linear") {
  const BlockJacobian jac = sample_jacobian(6, 5, Ordering::VariableBlocked);
  const int m = 2 * jac.num_cells();
  const auto x = fixtures::test_vector(m, 0.1), y = fixtures::test_vector(m, 1.9);
  std::vector<double> z(m);
  for (int i = 0; i < m; ++i) z[i] = 2.5 * x[i] - 0.75 * y[i];
  for (PreconditionerKind kind : {PreconditionerKind::CoupledAmg, PreconditionerKind::CprAmg1,
                                  PreconditionerKind::CprAmg2, PreconditionerKind::BlockFactorization,
                                  PreconditionerKind::ExactJacobian}) {
    CAPTURE(to_string(kind));
    PreconditionerSpec spec;
    spec.kind = kind;
    const auto p = make_preconditioner(jac, spec);
    CHECK(p->size() == m);
    for (double v : (*p)(std::vector<double>(m, 0.0))) CHECK(v == 0.0);
    const auto px = (*p)(x), py = (*p)(y), pz = (*p)(z);
    double scale = 0;
    for (int i = 0; i < m; ++i) scale = std::max(scale, std::abs(pz[i]));
    for (int i = 0; i < m; ++i) CHECK(std::abs(pz[i] - (2.5 * px[i] - 0.75 * py[i])) <= 1e-9 * scale);
  }
}

TEST_CASE("preconditioned GMRES converges for every method on a diffusion-dominated Jacobian") {
  const BlockJacobian jac = sample_jacobian(10, 6, Ordering::VariableBlocked);
  const auto b = fixtures::test_vector(jac.coupled().rows());
  GmresOptions o;
  o.rel_tol = 1e-8;
  for (PreconditionerKind kind : {PreconditionerKind::CprAmg1, PreconditionerKind::CprAmg2,
                                  PreconditionerKind::BlockFactorization, PreconditionerKind::ExactJacobian}) {
    CAPTURE(to_string(kind));
    PreconditionerSpec spec;
    spec.kind = kind;
    const auto p = make_preconditioner(jac, spec);
    const auto r = gmres(MatrixOperator(jac.coupled()), b, p.get(), o);
    CHECK(r.stats.converged);
    if (kind == PreconditionerKind::ExactJacobian) CHECK(r.stats.iterations <= 2);
  }
}

TEST_CASE("AMG statistics are reported per hierarchy") {
  const BlockJacobian jac = sample_jacobian(8, 8, Ordering::VariableBlocked);
  PreconditionerSpec spec;
  spec.kind = PreconditionerKind::BlockFactorization;
  CHECK(make_preconditioner(jac, spec)->amg_operator_complexities().size() == 2);
  spec.kind = PreconditionerKind::CprAmg1;
  CHECK(make_preconditioner(jac, spec)->amg_operator_complexities().size() == 1);
  spec.kind = PreconditionerKind::CprAmg2;
  CHECK(make_preconditioner(jac, spec)->amg_operator_complexities().size() == 2);
  spec.kind = PreconditionerKind::CoupledAmg;
  const auto c = make_preconditioner(jac, spec)->amg_operator_complexities();
  REQUIRE(c.size() == 1);
  CHECK(c[0] >= 1.0);
  spec.inner = InnerSolve::Exact;
  spec.kind = PreconditionerKind::BlockFactorization;
  CHECK(make_preconditioner(jac, spec)->amg_operator_complexities().empty());
}

TEST_CASE("preconditioner names and validation") {
  for (PreconditionerKind k : {PreconditionerKind::CoupledAmg, PreconditionerKind::CprAmg1,
                               PreconditionerKind::CprAmg2, PreconditionerKind::BlockFactorization,
                               PreconditionerKind::ExactJacobian})
    CHECK(parse_preconditioner_kind(to_string(k)) == k);
  CHECK_FALSE(parse_preconditioner_kind("jacobi").has_value());
  PreconditionerSpec spec;
  CHECK_NOTHROW(spec.validate());
  spec.scalar_amg.num_functions = 2;
  CHECK_THROWS_AS(spec.validate(), ValidationError);
  spec = PreconditionerSpec{};
  spec.coupled_amg.num_functions = 3;
  CHECK_THROWS_AS(spec.validate(), ValidationError);
  spec = PreconditionerSpec{};
  spec.scalar_amg.strength_threshold = -0.1;
  CHECK_THROWS_AS(spec.validate(), ValidationError);
}
