#include "twophase/sim.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>

namespace twophase {

void NewtonParams::validate() const {
  if (!(abs_tol > 0.0)) throw ValidationError("newton: abs_tol must be positive");
  if (!(linear_rel_tol > 0.0)) throw ValidationError("newton: linear_rel_tol must be positive");
  if (max_newton < 1) throw ValidationError("newton: max_newton must be >= 1");
  if (linear_max_iters < 1) throw ValidationError("newton: linear_max_iters must be >= 1");
  if (restart < 1) throw ValidationError("newton: restart must be >= 1");
  if (!(attainable_factor >= 0.0)) throw ValidationError("newton: attainable_factor must be >= 0");
}

void SimulationConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("time: dt must be positive");
  if (!(t_final > 0.0) || !std::isfinite(t_final)) throw ValidationError("time: t_final must be positive");
  if (snapshot_every < 0) throw ValidationError("output: snapshot_every must be >= 0");
  preconditioner.validate();
  newton.validate();
}

double residual_norm(const TwoPhaseProblem& problem, std::span<const double> residual, Ordering ordering,
                     bool scaled) {
  const int n = problem.num_cells();
  if (static_cast<int>(residual.size()) != 2 * n) throw DimensionError("residual_norm: size mismatch");
  double sum = 0.0;
  for (int c = 0; c < n; ++c) {
    for (Field f : {Field::Pressure, Field::Saturation}) {
      double r = residual[unknown_index(c, f, ordering, n)];
      if (scaled) {
        const double rho = f == Field::Pressure ? problem.fluid().rho_w : problem.fluid().rho_n;
        r /= problem.rock().porosity[c] * rho;
      }
      sum += r * r;
    }
  }
  return std::sqrt(sum);
}

namespace {

// u * || |A||x| + |b| || / ||b||: relative residual reachable in double precision.
double rounding_floor(const SparseMatrix& a, std::span<const double> x, std::span<const double> b) {
  double floor_sq = 0.0, b_sq = 0.0;
  for (int i = 0; i < a.rows(); ++i) {
    double t = std::abs(b[i]);
    const auto cols = a.row_cols(i);
    const auto vals = a.row_values(i);
    for (std::size_t q = 0; q < cols.size(); ++q) t += std::abs(vals[q] * x[cols[q]]);
    floor_sq += t * t;
    b_sq += b[i] * b[i];
  }
  return std::numeric_limits<double>::epsilon() * std::sqrt(floor_sq / b_sq);
}

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

// Runs Newton to completion or failure; on failure the partial counts are kept
// in `out` and the error is returned instead of thrown.
std::exception_ptr newton_attempt(const TwoPhaseProblem& problem, const State& state_old, double dt,
                                  const PreconditionerSpec& spec, const NewtonParams& params,
                                  const JacobianObserver& observer, NewtonResult& out) {
  const Ordering ord = params.ordering;
  out = NewtonResult{};
  out.state = state_old;
  std::vector<double> u = pack_state(state_old, ord);
  std::vector<double> f = assemble_residual(problem, out.state, state_old, dt, ord);
  double norm = residual_norm(problem, f, ord, params.scaled_norm);
  out.residual_norms.push_back(norm);

  const GmresOptions gopts{.rel_tol = params.linear_rel_tol,
                           .max_iters = params.linear_max_iters,
                           .restart = params.restart};
  try {
    if (!std::isfinite(norm)) throw NewtonDiverged("non-finite initial residual");
    while (norm > params.abs_tol) {
      if (out.newton_iterations >= params.max_newton)
        throw NewtonDiverged("Newton did not converge in " + std::to_string(params.max_newton) +
                             " iterations (||F|| = " + std::to_string(norm) + ")");
      const BlockJacobian jac = assemble_jacobian(problem, out.state, state_old, dt, ord);
      const auto precond = make_preconditioner(jac, spec);
      if (observer) observer(out.newton_iterations, jac, *precond);
      out.amg_operator_complexities.push_back(mean(precond->amg_operator_complexities()));

      std::vector<double> rhs(f.size());
      for (std::size_t i = 0; i < f.size(); ++i) rhs[i] = -f[i];
      const MatrixOperator jop(jac.coupled());
      GmresResult lin = gmres(jop, rhs, precond.get(), gopts);
      out.linear_iterations += lin.stats.iterations;
      out.linear_per_newton.push_back(lin.stats.iterations);
      ++out.newton_iterations;
      const bool at_floor = !lin.stats.converged && lin.stats.stagnated && params.attainable_factor > 0.0 &&
                            lin.stats.final_relative_residual <=
                                params.attainable_factor * rounding_floor(jac.coupled(), lin.x, rhs);
      if (at_floor) ++out.floor_limited_solves;
      if (!lin.stats.converged && !at_floor)
        throw LinearSolveFailed("GMRES did not converge (relative residual " +
                                    std::to_string(lin.stats.final_relative_residual) + " after " +
                                    std::to_string(lin.stats.iterations) + " iterations)",
                                lin.stats);

      double step = 1.0;
      std::vector<double> trial(u.size());
      for (int backtrack = 0;; ++backtrack) {
        for (std::size_t i = 0; i < u.size(); ++i) trial[i] = u[i] + step * lin.x[i];
        State candidate = unpack_state(trial, ord);
        std::vector<double> f_new = assemble_residual(problem, candidate, state_old, dt, ord);
        const double norm_new = residual_norm(problem, f_new, ord, params.scaled_norm);
        const bool accept = !params.line_search || backtrack >= 10 || (std::isfinite(norm_new) && norm_new < norm);
        if (accept) {
          u = trial;
          out.state = std::move(candidate);
          f = std::move(f_new);
          norm = norm_new;
          break;
        }
        step *= 0.5;
      }
      out.residual_norms.push_back(norm);
      if (!std::isfinite(norm)) throw NewtonDiverged("non-finite residual at Newton iteration " +
                                                     std::to_string(out.newton_iterations));
    }
  } catch (const SolverError&) {
    return std::current_exception();
  }
  return nullptr;
}

}  // namespace

NewtonResult newton_step(const TwoPhaseProblem& problem, const State& state_old, double dt,
                         const PreconditionerSpec& spec, const NewtonParams& params,
                         const JacobianObserver& observer) {
  params.validate();
  NewtonResult out;
  if (auto err = newton_attempt(problem, state_old, dt, spec, params, observer, out)) std::rethrow_exception(err);
  return out;
}

SimulationResult run_simulation(const TwoPhaseProblem& problem, const State& initial,
                                const SimulationConfig& config) {
  config.validate();
  using clock = std::chrono::steady_clock;
  const auto run_start = clock::now();

  SimulationResult result;
  result.final_state = initial;
  SolveMetrics& m = result.metrics;
  std::vector<double> all_complexities;

  const double t_end = config.t_final;
  const double eps = 1e-9 * config.dt;
  double t = 0.0;
  int index = 0;

  auto absorb = [&](StepMetrics& sm, const NewtonResult& r) {
    sm.newton_iterations += r.newton_iterations;
    sm.linear_iterations += r.linear_iterations;
    sm.floor_limited_solves += r.floor_limited_solves;
    sm.linear_per_newton.insert(sm.linear_per_newton.end(), r.linear_per_newton.begin(), r.linear_per_newton.end());
    sm.residual_norms.insert(sm.residual_norms.end(), r.residual_norms.begin(), r.residual_norms.end());
    all_complexities.insert(all_complexities.end(), r.amg_operator_complexities.begin(),
                            r.amg_operator_complexities.end());
  };
  auto message_of = [](const std::exception_ptr& e) {
    try {
      std::rethrow_exception(e);
    } catch (const std::exception& ex) {
      return std::string(ex.what());
    }
  };

  while (t < t_end - eps) {
    const double dt = std::min(config.dt, t_end - t);
    StepMetrics sm;
    sm.index = index;
    sm.dt = dt;
    const auto step_start = clock::now();

    NewtonResult r;
    auto err = newton_attempt(problem, result.final_state, dt, config.preconditioner, config.newton, {}, r);
    absorb(sm, r);
    State next = r.state;
    if (err && config.retry_half_step) {
      sm.cut = true;
      ++m.step_cut_count;
      NewtonResult h1;
      err = newton_attempt(problem, result.final_state, 0.5 * dt, config.preconditioner, config.newton, {}, h1);
      absorb(sm, h1);
      if (!err) {
        NewtonResult h2;
        err = newton_attempt(problem, h1.state, 0.5 * dt, config.preconditioner, config.newton, {}, h2);
        absorb(sm, h2);
        next = h2.state;
      }
    }
    sm.wall_seconds = std::chrono::duration<double>(clock::now() - step_start).count();
    sm.amg_operator_complexity = mean({all_complexities.end() - sm.linear_per_newton.size(), all_complexities.end()});
    m.total_newton += sm.newton_iterations;
    m.total_linear += sm.linear_iterations;
    m.floor_limited_solves += sm.floor_limited_solves;
    if (err) {
      sm.time = t;
      m.steps.push_back(std::move(sm));
      m.converged = false;
      m.failure_reason = "step " + std::to_string(index) + ": " + message_of(err);
      break;
    }
    t = (t_end - (t + dt) <= eps) ? t_end : t + dt;
    sm.time = t;
    m.steps.push_back(std::move(sm));
    result.final_state = std::move(next);
    ++index;
    if (config.snapshot_every > 0 && index % config.snapshot_every == 0)
      result.snapshots.emplace_back(t, result.final_state);
  }
  m.wall_seconds = std::chrono::duration<double>(clock::now() - run_start).count();
  m.amg_operator_complexity = mean(all_complexities);
  return result;
}

}  // namespace twophase
