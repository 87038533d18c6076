#include "twophase/precond.hpp"

#include <Eigen/SparseLU>
#include <cmath>

#include "twophase/errors.hpp"

namespace twophase {

std::string_view to_string(PreconditionerKind kind) {
  switch (kind) {
    case PreconditionerKind::CoupledAmg: return "amg";
    case PreconditionerKind::CprAmg1: return "cpr-amg1";
    case PreconditionerKind::CprAmg2: return "cpr-amg2";
    case PreconditionerKind::BlockFactorization: return "bf";
    case PreconditionerKind::ExactJacobian: return "exact";
  }
  return "?";
}

std::optional<PreconditionerKind> parse_preconditioner_kind(std::string_view s) {
  for (auto k : {PreconditionerKind::CoupledAmg, PreconditionerKind::CprAmg1, PreconditionerKind::CprAmg2,
                 PreconditionerKind::BlockFactorization, PreconditionerKind::ExactJacobian})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

void PreconditionerSpec::validate() const {
  if (scalar_amg.num_functions != 1) throw ValidationError("preconditioner: scalar AMG needs num_functions = 1");
  if (coupled_amg.num_functions != 1 && coupled_amg.num_functions != 2)
    throw ValidationError("preconditioner: coupled_num_functions must be 1 or 2");
  for (const AmgOptions* o : {&scalar_amg, &coupled_amg}) {
    if (o->cycles < 1) throw ValidationError("preconditioner: AMG cycles must be >= 1");
    if (!(o->strength_threshold > 0.0 && o->strength_threshold < 1.0))
      throw ValidationError("preconditioner: strength threshold must be in (0,1)");
    if (!(o->max_row_sum > 0.0)) throw ValidationError("preconditioner: max_row_sum must be positive");
    if (o->num_functions < 1) throw ValidationError("preconditioner: num_functions must be >= 1");
    if (o->max_levels < 1) throw ValidationError("preconditioner: max_levels must be >= 1");
    if (o->coarse_size < 1) throw ValidationError("preconditioner: coarse_size must be >= 1");
  }
}

FieldRestriction::FieldRestriction(int num_cells, Ordering ordering) : n_(num_cells), ordering_(ordering) {}

void FieldRestriction::restrict_to(Field f, std::span<const double> u, std::span<double> out) const {
  for (int c = 0; c < n_; ++c) out[c] = u[unknown_index(c, f, ordering_, n_)];
}

void FieldRestriction::prolong_add(Field f, std::span<const double> v, std::span<double> u) const {
  for (int c = 0; c < n_; ++c) u[unknown_index(c, f, ordering_, n_)] += v[c];
}

SparseMatrix FieldRestriction::matrix(Field f) const {
  std::vector<int> row_ptr(n_ + 1), col_idx(n_);
  for (int c = 0; c <= n_; ++c) row_ptr[c] = c;
  for (int c = 0; c < n_; ++c) col_idx[c] = unknown_index(c, f, ordering_, n_);
  return SparseMatrix(n_, 2 * n_, std::move(row_ptr), std::move(col_idx), std::vector<double>(n_, 1.0));
}

SparseMatrix build_simple_schur(const BlockJacobian& jac, bool as_printed) {
  const SparseMatrix app = jac.a_pp();
  const SparseMatrix aps = jac.a_ps();
  const SparseMatrix ass = jac.a_ss();
  std::vector<double> inv_diag = ass.diagonal_values();
  for (std::size_t c = 0; c < inv_diag.size(); ++c) {
    if (inv_diag[c] == 0.0)
      throw ValidationError("SIMPLE Schur complement: zero diagonal of A_ss in cell " + std::to_string(c));
    inv_diag[c] = 1.0 / inv_diag[c];
  }
  const SparseMatrix last = as_printed ? app : jac.a_sp();
  return add(app, multiply(scale_columns(aps, inv_diag), last), 1.0, -1.0);
}

namespace {

std::vector<double> complexities_of(std::initializer_list<const LinearOperator*> ops) {
  std::vector<double> out;
  for (const LinearOperator* op : ops)
    if (const auto* amg = dynamic_cast<const AmgHierarchy*>(op)) out.push_back(amg->operator_complexity());
  return out;
}

// r1 = r - J u
std::vector<double> residual_update(const SparseMatrix& jac, std::span<const double> r, std::span<const double> u) {
  std::vector<double> r1(r.size());
  jac.multiply(u, r1);
  for (std::size_t i = 0; i < r1.size(); ++i) r1[i] = r[i] - r1[i];
  return r1;
}

}  // namespace

CombinativeCpr::CombinativeCpr(SparseMatrix jac, FieldRestriction restriction,
                               std::unique_ptr<LinearOperator> stage1,
                               std::unique_ptr<LinearOperator> pressure_solve)
    : jac_(std::move(jac)),
      restriction_(restriction),
      stage1_(std::move(stage1)),
      pressure_(std::move(pressure_solve)) {}

void CombinativeCpr::apply(std::span<const double> r, std::span<double> u) const {
  const int n = restriction_.num_cells();
  stage1_->apply(r, u);
  const auto r1 = residual_update(jac_, r, u);
  std::vector<double> rp(n), dp(n);
  restriction_.restrict_to(Field::Pressure, r1, rp);
  pressure_->apply(rp, dp);
  restriction_.prolong_add(Field::Pressure, dp, u);
}

std::vector<double> CombinativeCpr::amg_operator_complexities() const {
  return complexities_of({pressure_.get()});
}

AdditiveCpr::AdditiveCpr(SparseMatrix jac, FieldRestriction restriction, std::unique_ptr<LinearOperator> stage1,
                         std::unique_ptr<LinearOperator> pressure_solve,
                         std::unique_ptr<LinearOperator> saturation_solve)
    : jac_(std::move(jac)),
      restriction_(restriction),
      stage1_(std::move(stage1)),
      pressure_(std::move(pressure_solve)),
      saturation_(std::move(saturation_solve)) {}

void AdditiveCpr::apply(std::span<const double> r, std::span<double> u) const {
  const int n = restriction_.num_cells();
  stage1_->apply(r, u);
  const auto r1 = residual_update(jac_, r, u);
  std::vector<double> rf(n), d(n);
  restriction_.restrict_to(Field::Pressure, r1, rf);
  pressure_->apply(rf, d);
  restriction_.prolong_add(Field::Pressure, d, u);
  restriction_.restrict_to(Field::Saturation, r1, rf);
  saturation_->apply(rf, d);
  restriction_.prolong_add(Field::Saturation, d, u);
}

std::vector<double> AdditiveCpr::amg_operator_complexities() const {
  return complexities_of({pressure_.get(), saturation_.get()});
}

BlockFactorizationPreconditioner::BlockFactorizationPreconditioner(
    SparseMatrix a_ps, FieldRestriction restriction, std::unique_ptr<LinearOperator> saturation_solve,
    std::unique_ptr<LinearOperator> schur_solve)
    : a_ps_(std::move(a_ps)),
      restriction_(restriction),
      saturation_(std::move(saturation_solve)),
      schur_(std::move(schur_solve)) {}

void BlockFactorizationPreconditioner::apply(std::span<const double> r, std::span<double> u) const {
  const int n = restriction_.num_cells();
  std::vector<double> rs(n), s(n), rp(n), p(n), coupling(n);
  restriction_.restrict_to(Field::Saturation, r, rs);
  saturation_->apply(rs, s);
  restriction_.restrict_to(Field::Pressure, r, rp);
  a_ps_.multiply(s, coupling);
  for (int i = 0; i < n; ++i) rp[i] -= coupling[i];
  schur_->apply(rp, p);
  std::fill(u.begin(), u.end(), 0.0);
  restriction_.prolong_add(Field::Pressure, p, u);
  restriction_.prolong_add(Field::Saturation, s, u);
}

std::vector<double> BlockFactorizationPreconditioner::amg_operator_complexities() const {
  return complexities_of({saturation_.get(), schur_.get()});
}

CoupledAmgPreconditioner::CoupledAmgPreconditioner(const BlockJacobian& jac, const AmgOptions& options) {
  const BlockJacobian point = jac.reordered(Ordering::PointInterleaved);
  auto amg = std::make_unique<AmgHierarchy>(point.coupled(), options);
  complexity_ = amg->operator_complexity();
  if (jac.ordering() == Ordering::PointInterleaved)
    op_ = std::move(amg);
  else
    op_ = std::make_unique<PermutedOperator>(
        std::move(amg), ordering_permutation(jac.num_cells(), jac.ordering(), Ordering::PointInterleaved));
}

struct SparseDirectSolve::Impl {
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
};

SparseDirectSolve::SparseDirectSolve(const SparseMatrix& a) : n_(a.rows()), impl_(std::make_unique<Impl>()) {
  if (a.rows() != a.cols()) throw DimensionError("SparseDirectSolve needs a square matrix");
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(a.nnz());
  for (int i = 0; i < a.rows(); ++i) {
    auto cols = a.row_cols(i);
    auto vals = a.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) t.emplace_back(i, cols[k], vals[k]);
  }
  Eigen::SparseMatrix<double> m(a.rows(), a.cols());
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  impl_->lu.compute(m);
  if (impl_->lu.info() != Eigen::Success) throw SolverError("sparse LU failed: matrix is singular");
}

SparseDirectSolve::~SparseDirectSolve() = default;

void SparseDirectSolve::apply(std::span<const double> x, std::span<double> y) const {
  Eigen::Map<const Eigen::VectorXd> rhs(x.data(), static_cast<Eigen::Index>(x.size()));
  Eigen::Map<Eigen::VectorXd> out(y.data(), static_cast<Eigen::Index>(y.size()));
  out = impl_->lu.solve(rhs);
}

std::unique_ptr<LinearOperator> make_inner_solver(SparseMatrix a, InnerSolve mode, const AmgOptions& options) {
  if (mode == InnerSolve::Exact) return std::make_unique<SparseDirectSolve>(a);
  return std::make_unique<AmgHierarchy>(std::move(a), options);
}

std::unique_ptr<LinearOperator> make_ilu_stage(const BlockJacobian& jac, Ordering ilu_ordering) {
  if (ilu_ordering == jac.ordering()) return std::make_unique<Ilu0>(jac.coupled());
  const BlockJacobian other = jac.reordered(ilu_ordering);
  return std::make_unique<PermutedOperator>(std::make_unique<Ilu0>(other.coupled()),
                                            ordering_permutation(jac.num_cells(), jac.ordering(), ilu_ordering));
}

std::unique_ptr<Preconditioner> make_preconditioner(const BlockJacobian& jac, const PreconditionerSpec& spec) {
  spec.validate();
  const FieldRestriction restriction(jac.num_cells(), jac.ordering());
  switch (spec.kind) {
    case PreconditionerKind::CoupledAmg:
      return std::make_unique<CoupledAmgPreconditioner>(jac, spec.coupled_amg);
    case PreconditionerKind::CprAmg1:
      return std::make_unique<CombinativeCpr>(jac.coupled(), restriction, make_ilu_stage(jac, spec.ilu_ordering),
                                              make_inner_solver(jac.a_pp(), spec.inner, spec.scalar_amg));
    case PreconditionerKind::CprAmg2:
      return std::make_unique<AdditiveCpr>(jac.coupled(), restriction, make_ilu_stage(jac, spec.ilu_ordering),
                                           make_inner_solver(jac.a_pp(), spec.inner, spec.scalar_amg),
                                           make_inner_solver(jac.a_ss(), spec.inner, spec.scalar_amg));
    case PreconditionerKind::BlockFactorization:
      return std::make_unique<BlockFactorizationPreconditioner>(
          jac.a_ps(), restriction, make_inner_solver(jac.a_ss(), spec.inner, spec.scalar_amg),
          make_inner_solver(build_simple_schur(jac, spec.schur_as_printed), spec.inner, spec.scalar_amg));
    case PreconditionerKind::ExactJacobian:
      return std::make_unique<OperatorPreconditioner>(std::make_unique<SparseDirectSolve>(jac.coupled()));
  }
  throw ValidationError("unknown preconditioner kind");
}

}  // namespace twophase
