#pragma once

#include <complex>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "twophase/scenario.hpp"
#include "twophase/sim.hpp"
#include "twophase/spectrum.hpp"

namespace twophase {

struct BenchmarkCase {
  std::string name;
  Scenario scenario;
  std::vector<PreconditionerKind> methods;
};

struct BenchmarkSuite {
  std::string name = "suite";
  int repetitions = 1;
  std::vector<BenchmarkCase> cases;

  void validate() const;
};

/// [suite] name, repetitions; one [case:NAME] section per scenario with
/// `scenario = <path>` and `methods = <kind> ...` (default: the scenario's own).
BenchmarkSuite load_suite(const std::filesystem::path& path);

struct RunRecord {
  std::string scenario;
  std::string method;
  SolveMetrics metrics;
};

/// Simulates `scenario` with its preconditioner replaced by `method`. Solver
/// failures are reported through metrics.converged / failure_reason.
SolveMetrics run_with_method(const Scenario& scenario, PreconditionerKind method, State* final_state = nullptr);

/// One record per (case, method). With repetitions > 1 the iteration counts
/// come from the first run and wall_seconds is the minimum over runs.
std::vector<RunRecord> run_benchmark(const BenchmarkSuite& suite);

/// Columns: scenario, method, NI, LI, LI_per_NI, wall_seconds, converged,
/// amg_operator_complexity (6 significant digits).
void write_metrics_csv(std::ostream& out, const std::vector<RunRecord>& records);
/// Full-precision mirror including per-step detail.
void write_metrics_json(std::ostream& out, const std::vector<RunRecord>& records);

/// Jacobian of the first time step at Newton iteration `newton_index`
/// (0 = at the old state). Throws ValidationError when Newton converges first.
BlockJacobian capture_jacobian(const Scenario& scenario, int newton_index);

/// Eigenvalues of J M^{-1} for `method` with exact inner solves.
std::vector<std::complex<double>> preconditioned_spectrum(const BlockJacobian& jac, const Scenario& scenario,
                                                          PreconditionerKind method,
                                                          const SpectrumOptions& options = {});

void write_spectrum_csv(std::ostream& out, const std::vector<std::complex<double>>& eigenvalues);

/// cell, i, j, k, p_w, s_n
void write_state_csv(std::ostream& out, const Grid& grid, const State& state);

}  // namespace twophase
