#pragma once

#include <memory>
#include <span>
#include <vector>

#include "twophase/linear_operator.hpp"
#include "twophase/sparse.hpp"

namespace twophase {

struct AmgOptions {
  double strength_threshold = 0.25;
  // Rows with |sum_j a_ij| > max_row_sum * |a_ii| get no strong connections;
  // values >= 1 disable the test.
  double max_row_sum = 0.9;
  // Unknown approach for systems: unknown i belongs to function i % num_functions
  // on the finest level, and only same-function couplings enter coarsening and
  // interpolation. 1 is plain scalar AMG.
  int num_functions = 1;
  int max_levels = 25;
  int coarse_size = 64;  // stop coarsening at or below this many rows
  int cycles = 1;        // V-cycles per application
  int pre_sweeps = 1;
  int post_sweeps = 1;

  bool operator==(const AmgOptions&) const = default;
};

enum class PointType : char { Fine = 0, Coarse = 1 };

/// Strong-dependence pattern: row i lists the j with
/// |a_ij| >= theta * max_{k != i} |a_ik| (and a_ij != 0). Values are all 1.
/// Rows whose signed row sum exceeds max_row_sum * |a_ii| in magnitude are
/// treated as having only weak connections. With `functions` non-empty only
/// entries between unknowns of the same function are considered.
SparseMatrix strength_graph(const SparseMatrix& a, double theta, double max_row_sum = 1.0,
                            std::span<const int> functions = {});

/// Classical Ruge-Stueben C/F splitting: maximal-independent-set first pass
/// by influence measure, then the second pass that guarantees every pair of
/// strongly connected F-points shares a C-point. Ties go to the lowest index.
std::vector<PointType> ruge_stueben_splitting(const SparseMatrix& strength);

/// Classical interpolation: strong C neighbors interpolate directly, strong
/// F neighbors are distributed to the common C-points, weak connections are
/// lumped into the diagonal. With `functions` non-empty, couplings between
/// different functions are dropped.
SparseMatrix classical_interpolation(const SparseMatrix& a, const SparseMatrix& strength,
                                     const std::vector<PointType>& splitting, std::span<const int> functions = {});

/// Multilevel hierarchy; apply() runs one V(pre,post) cycle per
/// AmgOptions::cycles from a zero initial guess with forward Gauss-Seidel
/// smoothing and an exact solve on the coarsest level.
class AmgHierarchy final : public LinearOperator {
 public:
  struct Level {
    SparseMatrix a;
    SparseMatrix p;  // prolongation to this level from the next coarser one
    SparseMatrix r;  // p^T
    std::vector<PointType> splitting;
    std::vector<int> functions;  // empty for scalar AMG
  };

  AmgHierarchy(SparseMatrix a, const AmgOptions& options = {});
  ~AmgHierarchy() override;
  AmgHierarchy(AmgHierarchy&&) noexcept;
  AmgHierarchy& operator=(AmgHierarchy&&) noexcept;

  int size() const override { return levels_.front().a.rows(); }
  void apply(std::span<const double> b, std::span<double> x) const override;

  int num_levels() const { return static_cast<int>(levels_.size()); }
  const Level& level(int l) const { return levels_[l]; }
  double operator_complexity() const;
  double grid_complexity() const;

 private:
  void cycle(int l, std::span<const double> b, std::span<double> x) const;

  struct CoarseSolver;
  AmgOptions options_;
  std::vector<Level> levels_;
  std::unique_ptr<CoarseSolver> coarse_;
};

/// One forward Gauss-Seidel sweep on A x = b, updating x in place.
void gauss_seidel_forward(const SparseMatrix& a, std::span<const double> b, std::span<double> x);

}  // namespace twophase
