#pragma once

#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "twophase/amg.hpp"
#include "twophase/discretize.hpp"
#include "twophase/ilu0.hpp"
#include "twophase/linear_operator.hpp"

namespace twophase {

enum class PreconditionerKind {
  CoupledAmg,          // one AMG V-cycle on the point-ordered coupled matrix
  CprAmg1,             // two-stage combinative: ILU(0) + pressure correction
  CprAmg2,             // two-stage additive: ILU(0) + pressure and saturation corrections
  BlockFactorization,  // upper block-triangular with the SIMPLE Schur complement
  ExactJacobian,       // direct solve with J itself (debugging / spectrum reference)
};

std::string_view to_string(PreconditionerKind kind);
std::optional<PreconditionerKind> parse_preconditioner_kind(std::string_view s);

/// How the single-field subsystems (A_pp, A_ss, Schur) are solved inside a
/// preconditioner application.
enum class InnerSolve { AmgVCycle, Exact };

struct PreconditionerSpec {
  PreconditionerKind kind = PreconditionerKind::BlockFactorization;
  AmgOptions scalar_amg{};                      // pressure, saturation and Schur systems
  AmgOptions coupled_amg{.strength_threshold = 0.5, .num_functions = 2};  // point-ordered coupled system
  Ordering ilu_ordering = Ordering::PointInterleaved;
  InnerSolve inner = InnerSolve::AmgVCycle;
  // Use the literal A_ps diag(A_ss)^{-1} A_pp product instead of A_sp.
  bool schur_as_printed = false;

  void validate() const;
  bool operator==(const PreconditionerSpec&) const = default;
};

/// Restriction of the coupled 2N vector onto the pressure or saturation
/// unknowns (R_p, R_s) and the matching prolongations R^T.
class FieldRestriction {
 public:
  FieldRestriction(int num_cells, Ordering ordering);

  int num_cells() const { return n_; }
  Ordering ordering() const { return ordering_; }
  void restrict_to(Field f, std::span<const double> u, std::span<double> out) const;
  /// u += R_f^T v
  void prolong_add(Field f, std::span<const double> v, std::span<double> u) const;
  /// R_f as an N x 2N sparse matrix.
  SparseMatrix matrix(Field f) const;

 private:
  int n_;
  Ordering ordering_;
};

/// SIMPLE-type approximate Schur complement
///   S~ = A_pp - A_ps diag(A_ss)^{-1} A_sp
/// (or with A_pp in the last factor when `as_printed`).
/// Throws ValidationError naming the cell when diag(A_ss) has a zero.
SparseMatrix build_simple_schur(const BlockJacobian& jac, bool as_printed = false);

class Preconditioner : public LinearOperator {
 public:
  /// Operator complexities of the AMG hierarchies owned by this instance.
  virtual std::vector<double> amg_operator_complexities() const { return {}; }
};

/// CPR-AMG(1): u1 = P1^{-1} r; r1 = r - J u1; return u1 + R_p^T A_pp^{-1} R_p r1.
class CombinativeCpr final : public Preconditioner {
 public:
  CombinativeCpr(SparseMatrix jac, FieldRestriction restriction, std::unique_ptr<LinearOperator> stage1,
                 std::unique_ptr<LinearOperator> pressure_solve);
  int size() const override { return jac_.rows(); }
  void apply(std::span<const double> r, std::span<double> u) const override;
  std::vector<double> amg_operator_complexities() const override;

 private:
  SparseMatrix jac_;
  FieldRestriction restriction_;
  std::unique_ptr<LinearOperator> stage1_;
  std::unique_ptr<LinearOperator> pressure_;
};

/// CPR-AMG(2): as CPR-AMG(1) plus the saturation correction R_s^T A_ss^{-1} R_s r1.
class AdditiveCpr final : public Preconditioner {
 public:
  AdditiveCpr(SparseMatrix jac, FieldRestriction restriction, std::unique_ptr<LinearOperator> stage1,
              std::unique_ptr<LinearOperator> pressure_solve, std::unique_ptr<LinearOperator> saturation_solve);
  int size() const override { return jac_.rows(); }
  void apply(std::span<const double> r, std::span<double> u) const override;
  std::vector<double> amg_operator_complexities() const override;

 private:
  SparseMatrix jac_;
  FieldRestriction restriction_;
  std::unique_ptr<LinearOperator> stage1_;
  std::unique_ptr<LinearOperator> pressure_;
  std::unique_ptr<LinearOperator> saturation_;
};

/// Upper block-triangular solve with [[S~, A_ps], [0, A_ss]]:
///   s = A_ss^{-1} R_s r;  p = S~^{-1} (R_p r - A_ps s).
class BlockFactorizationPreconditioner final : public Preconditioner {
 public:
  BlockFactorizationPreconditioner(SparseMatrix a_ps, FieldRestriction restriction,
                                   std::unique_ptr<LinearOperator> saturation_solve,
                                   std::unique_ptr<LinearOperator> schur_solve);
  int size() const override { return 2 * restriction_.num_cells(); }
  void apply(std::span<const double> r, std::span<double> u) const override;
  std::vector<double> amg_operator_complexities() const override;

 private:
  SparseMatrix a_ps_;
  FieldRestriction restriction_;
  std::unique_ptr<LinearOperator> saturation_;
  std::unique_ptr<LinearOperator> schur_;
};

/// Black-box AMG on the whole coupled matrix in point ordering.
class CoupledAmgPreconditioner final : public Preconditioner {
 public:
  /// `jac` may be in either ordering; the hierarchy is always built on the
  /// point-interleaved matrix.
  CoupledAmgPreconditioner(const BlockJacobian& jac, const AmgOptions& options);
  int size() const override { return op_->size(); }
  void apply(std::span<const double> r, std::span<double> u) const override { op_->apply(r, u); }
  std::vector<double> amg_operator_complexities() const override { return {complexity_}; }

 private:
  std::unique_ptr<LinearOperator> op_;
  double complexity_;
};

/// Wraps any operator as a Preconditioner (no AMG statistics).
class OperatorPreconditioner final : public Preconditioner {
 public:
  explicit OperatorPreconditioner(std::unique_ptr<LinearOperator> op) : op_(std::move(op)) {}
  int size() const override { return op_->size(); }
  void apply(std::span<const double> r, std::span<double> u) const override { op_->apply(r, u); }

 private:
  std::unique_ptr<LinearOperator> op_;
};

/// Exact sparse direct solve (sparse LU with fill-reducing ordering).
class SparseDirectSolve final : public LinearOperator {
 public:
  explicit SparseDirectSolve(const SparseMatrix& a);
  ~SparseDirectSolve() override;
  int size() const override { return n_; }
  void apply(std::span<const double> x, std::span<double> y) const override;

 private:
  struct Impl;
  int n_;
  std::unique_ptr<Impl> impl_;
};

/// Inner solver for a single-field system according to `mode`.
std::unique_ptr<LinearOperator> make_inner_solver(SparseMatrix a, InnerSolve mode, const AmgOptions& options);

/// ILU(0) of J in `ilu_ordering`, presented in J's ordering.
std::unique_ptr<LinearOperator> make_ilu_stage(const BlockJacobian& jac, Ordering ilu_ordering);

/// Builds the preconditioner selected by `spec` from the current Jacobian.
std::unique_ptr<Preconditioner> make_preconditioner(const BlockJacobian& jac, const PreconditionerSpec& spec);

}  // namespace twophase
