#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "twophase/errors.hpp"
#include "twophase/scenario.hpp"
#include "twophase/spe10.hpp"
#include "twophase/study.hpp"

namespace fs = std::filesystem;
using namespace twophase;

namespace {

constexpr int kOk = 0;
constexpr int kValidationFailure = 2;
constexpr int kSolverFailure = 3;

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  return out;
}

int cmd_run(const fs::path& cfg) {
  const Scenario s = load_scenario(cfg);
  const TwoPhaseProblem problem = build_problem(s);
  const SimulationResult result = run_simulation(problem, initial_state(s), simulation_config(s));
  const fs::path dir = output_directory(s);
  const std::vector<RunRecord> records{{s.name, std::string(to_string(s.preconditioner.kind)), result.metrics}};
  {
    auto out = open_output(dir / (s.name + "_metrics.csv"));
    write_metrics_csv(out, records);
  }
  {
    auto out = open_output(dir / (s.name + "_metrics.json"));
    write_metrics_json(out, records);
  }
  {
    auto out = open_output(dir / (s.name + "_final.csv"));
    write_state_csv(out, problem.grid(), result.final_state);
  }
  for (std::size_t i = 0; i < result.snapshots.size(); ++i) {
    auto out = open_output(dir / (s.name + "_snapshot_" + std::to_string(i) + ".csv"));
    write_state_csv(out, problem.grid(), result.snapshots[i].second);
  }
  write_metrics_csv(std::cout, records);
  if (!result.metrics.converged) {
    std::cerr << "solver failure: " << result.metrics.failure_reason << '\n';
    return kSolverFailure;
  }
  return kOk;
}

int cmd_bench(const fs::path& cfg, const std::string& out_dir) {
  const BenchmarkSuite suite = load_suite(cfg);
  const auto records = run_benchmark(suite);
  fs::path dir = out_dir;
  if (const char* env = std::getenv("TWOPHASE_OUTPUT_DIR"); env && *env) dir = env;
  {
    auto out = open_output(dir / (suite.name + ".csv"));
    write_metrics_csv(out, records);
  }
  {
    auto out = open_output(dir / (suite.name + ".json"));
    write_metrics_json(out, records);
  }
  write_metrics_csv(std::cout, records);
  return kOk;
}

int cmd_spectrum(const fs::path& cfg, const std::string& method, int newton, const std::string& out_path,
                 const std::string& matrix_path) {
  const Scenario s = load_scenario(cfg);
  const auto kind = parse_preconditioner_kind(method);
  if (!kind) throw ValidationError("unknown method '" + method + "'");
  const BlockJacobian jac = capture_jacobian(s, newton);
  if (!matrix_path.empty()) {
    auto out = open_output(matrix_path);
    write_matrix_market(jac.coupled(), out);
  }
  const auto eig = preconditioned_spectrum(jac, s, *kind);
  fs::path path = out_path;
  if (path.empty())
    path = output_directory(s) / (s.name + "_spectrum_" + method + "_newton" + std::to_string(newton) + ".csv");
  auto out = open_output(path);
  write_spectrum_csv(out, eig);
  std::cout << "wrote " << eig.size() << " eigenvalues to " << path.string() << '\n';
  return kOk;
}

int cmd_validate(const fs::path& cfg, bool print) {
  const Scenario s = load_scenario(cfg);
  build_rock(s);
  if (print) write_scenario(std::cout, s);
  else std::cout << cfg.string() << ": ok\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fully implicit two-phase porous media flow with block preconditioners"};
  app.require_subcommand(1);

  fs::path run_cfg, bench_cfg, spec_cfg, val_cfg;
  std::string bench_out = "bench_output", method = "bf", spec_out, matrix_out;
  int newton = 0;
  bool print = false;
  SyntheticSpe10Options gen;
  std::string gen_perm = "spe_perm.dat", gen_poro = "spe_phi.dat";

  auto* run = app.add_subcommand("run", "Simulate a scenario and write metrics and final state");
  run->add_option("scenario", run_cfg)->required()->check(CLI::ExistingFile);

  auto* bench = app.add_subcommand("bench", "Run a benchmark suite and write CSV/JSON metrics");
  bench->add_option("suite", bench_cfg)->required()->check(CLI::ExistingFile);
  bench->add_option("--out", bench_out, "Output directory")->capture_default_str();

  auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues of the preconditioned Jacobian J M^-1");
  spectrum->add_option("scenario", spec_cfg)->required()->check(CLI::ExistingFile);
  spectrum->add_option("--method", method, "amg, cpr-amg1, cpr-amg2, bf or exact")->capture_default_str();
  spectrum->add_option("--newton", newton, "Newton iteration of the first time step (0-based)")
      ->capture_default_str();
  spectrum->add_option("--out", spec_out, "Output CSV path");
  spectrum->add_option("--matrix", matrix_out, "Also write the Jacobian in MatrixMarket format");

  auto* validate = app.add_subcommand("validate", "Parse and validate a scenario");
  validate->add_option("scenario", val_cfg)->required()->check(CLI::ExistingFile);
  validate->add_flag("--print", print, "Print the normalized scenario (SI units)");

  auto* generate = app.add_subcommand("generate", "Write synthetic SPE10-layout permeability/porosity files");
  generate->add_option("--perm", gen_perm)->capture_default_str();
  generate->add_option("--poro", gen_poro)->capture_default_str();
  generate->add_option("--dims", gen.dims)->expected(3)->capture_default_str();
  generate->add_option("--mean-md", gen.geometric_mean_md)->capture_default_str();
  generate->add_option("--log-std", gen.log_std)->capture_default_str();
  generate->add_option("--vertical-ratio", gen.vertical_ratio)->capture_default_str();
  generate->add_option("--porosity", gen.porosity)->capture_default_str();
  generate->add_option("--porosity-spread", gen.porosity_spread)->capture_default_str();
  generate->add_option("--seed", gen.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kValidationFailure;
  }

  try {
    if (*run) return cmd_run(run_cfg);
    if (*bench) return cmd_bench(bench_cfg, bench_out);
    if (*spectrum) return cmd_spectrum(spec_cfg, method, newton, spec_out, matrix_out);
    if (*validate) return cmd_validate(val_cfg, print);
    if (*generate) {
      write_synthetic_spe10(gen_perm, gen_poro, gen);
      return kOk;
    }
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const DimensionError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolverFailure;
  }
  return kOk;
}
