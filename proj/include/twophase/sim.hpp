#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "twophase/discretize.hpp"
#include "twophase/errors.hpp"
#include "twophase/gmres.hpp"
#include "twophase/precond.hpp"

namespace twophase {

struct NewtonParams {
  double abs_tol = 1e-6;  // on ||F||_2
  int max_newton = 50;
  double linear_rel_tol = 1e-12;
  int linear_max_iters = 2000;
  int restart = 200;
  // A GMRES solve that stagnates above linear_rel_tol is still accepted when its
  // relative residual is within this factor of the rounding floor
  // u * || |J||x| + |b| || / ||b||. 0 requires linear_rel_tol strictly.
  double attainable_factor = 16.0;
  bool line_search = false;  // backtracking on ||F|| (off for reference runs)
  bool scaled_norm = false;  // divide each equation by phi * rho of its phase
  Ordering ordering = Ordering::VariableBlocked;

  void validate() const;
  bool operator==(const NewtonParams&) const = default;
};

class NewtonDiverged : public SolverError {
 public:
  using SolverError::SolverError;
};

class LinearSolveFailed : public SolverError {
 public:
  LinearSolveFailed(const std::string& what, KrylovStats stats) : SolverError(what), stats_(std::move(stats)) {}
  const KrylovStats& stats() const { return stats_; }

 private:
  KrylovStats stats_;
};

struct NewtonResult {
  State state;
  int newton_iterations = 0;
  int linear_iterations = 0;
  std::vector<int> linear_per_newton;
  int floor_limited_solves = 0;  // accepted at the rounding floor
  std::vector<double> residual_norms;  // ||F|| before each update and after the last
  std::vector<double> amg_operator_complexities;  // per Newton iteration, mean over hierarchies
};

/// Called with the Newton index (0-based), the Jacobian and the preconditioner
/// built from it, before the linear solve.
using JacobianObserver = std::function<void(int, const BlockJacobian&, const Preconditioner&)>;

/// Backward-Euler step from `state_old` with Newton's method and
/// preconditioned GMRES. The preconditioner is rebuilt for every Jacobian.
/// Throws NewtonDiverged or LinearSolveFailed.
NewtonResult newton_step(const TwoPhaseProblem& problem, const State& state_old, double dt,
                         const PreconditionerSpec& spec, const NewtonParams& params = {},
                         const JacobianObserver& observer = {});

/// Residual norm used by the Newton termination test.
double residual_norm(const TwoPhaseProblem& problem, std::span<const double> residual, Ordering ordering,
                     bool scaled);

struct StepMetrics {
  int index = 0;
  double time = 0.0;  // end of step, s
  double dt = 0.0;    // requested step, s
  int newton_iterations = 0;
  int linear_iterations = 0;
  double wall_seconds = 0.0;
  bool cut = false;  // completed as two half steps
  std::vector<int> linear_per_newton;
  int floor_limited_solves = 0;
  std::vector<double> residual_norms;
  double amg_operator_complexity = 0.0;  // mean over Newton iterations
};

struct SolveMetrics {
  std::vector<StepMetrics> steps;
  int total_newton = 0;
  int total_linear = 0;
  double wall_seconds = 0.0;
  int step_cut_count = 0;
  int floor_limited_solves = 0;
  bool converged = true;
  std::string failure_reason;
  double amg_operator_complexity = 0.0;  // mean over all Newton iterations

  double li_per_ni() const { return total_newton > 0 ? double(total_linear) / total_newton : 0.0; }
  double ni_per_step() const { return steps.empty() ? 0.0 : double(total_newton) / steps.size(); }
};

struct SimulationConfig {
  double dt = 0.0;       // s
  double t_final = 0.0;  // s
  PreconditionerSpec preconditioner{};
  NewtonParams newton{};
  int snapshot_every = 0;  // keep every k-th state; 0 keeps none
  bool retry_half_step = true;

  void validate() const;
};

struct SimulationResult {
  SolveMetrics metrics;
  State final_state;
  std::vector<std::pair<double, State>> snapshots;
};

/// Fixed-step loop to t_final (the last step is shortened if dt does not
/// divide the interval). A failed step is retried once as two half steps;
/// a second failure stops the run with converged = false.
SimulationResult run_simulation(const TwoPhaseProblem& problem, const State& initial,
                                const SimulationConfig& config);

}  // namespace twophase
