#include "twophase/study.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <sstream>

#include "twophase/errors.hpp"

namespace twophase {

namespace {

std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

void BenchmarkSuite::validate() const {
  if (repetitions < 1) throw ValidationError("suite: repetitions must be >= 1");
  std::set<std::string> names;
  for (const auto& c : cases) {
    if (!names.insert(c.name).second) throw ValidationError("suite: duplicate case name '" + c.name + "'");
    if (c.methods.empty()) throw ValidationError("suite: case '" + c.name + "' has no methods");
  }
}

BenchmarkSuite load_suite(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::read_ini(in, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ParseError(e.message(), static_cast<int>(e.line()));
  }
  BenchmarkSuite suite;
  const auto base = path.parent_path();
  for (const auto& [name, tree] : pt) {
    if (name == "suite") {
      for (const auto& [k, v] : tree) {
        if (k == "name") suite.name = v.data();
        else if (k == "repetitions") {
          try {
            suite.repetitions = std::stoi(v.data());
          } catch (const std::exception&) {
            throw ParseError("[suite] repetitions: expected an integer");
          }
        } else {
          throw ParseError("[suite] " + k + ": unknown key");
        }
      }
    } else if (name.rfind("case:", 0) == 0) {
      BenchmarkCase c;
      c.name = name.substr(5);
      std::optional<std::string> scenario_path;
      std::string methods;
      for (const auto& [k, v] : tree) {
        if (k == "scenario") scenario_path = v.data();
        else if (k == "methods") methods = v.data();
        else throw ParseError("[" + name + "] " + k + ": unknown key");
      }
      if (!scenario_path) throw ParseError("[" + name + "] missing required key 'scenario'");
      std::filesystem::path sp(*scenario_path);
      if (sp.is_relative()) sp = base / sp;
      c.scenario = load_scenario(sp);
      std::istringstream ms(methods);
      for (std::string m; ms >> m;) {
        auto k = parse_preconditioner_kind(m);
        if (!k) throw ParseError("[" + name + "] methods: unknown method '" + m + "'");
        c.methods.push_back(*k);
      }
      if (c.methods.empty()) c.methods.push_back(c.scenario.preconditioner.kind);
      suite.cases.push_back(std::move(c));
    } else {
      throw ParseError("unknown section [" + name + "]");
    }
  }
  suite.validate();
  return suite;
}

SolveMetrics run_with_method(const Scenario& scenario, PreconditionerKind method, State* final_state) {
  SimulationConfig config = simulation_config(scenario);
  config.preconditioner.kind = method;
  const TwoPhaseProblem problem = build_problem(scenario);
  SimulationResult r = run_simulation(problem, initial_state(scenario), config);
  if (final_state) *final_state = std::move(r.final_state);
  return r.metrics;
}

std::vector<RunRecord> run_benchmark(const BenchmarkSuite& suite) {
  suite.validate();
  std::vector<RunRecord> out;
  for (const auto& c : suite.cases) {
    for (PreconditionerKind m : c.methods) {
      RunRecord rec{c.name, std::string(to_string(m)), {}};
      for (int rep = 0; rep < suite.repetitions; ++rep) {
        SolveMetrics metrics;
        try {
          metrics = run_with_method(c.scenario, m);
        } catch (const Error& e) {
          metrics.converged = false;
          metrics.failure_reason = e.what();
        }
        if (rep == 0) rec.metrics = std::move(metrics);
        else rec.metrics.wall_seconds = std::min(rec.metrics.wall_seconds, metrics.wall_seconds);
      }
      out.push_back(std::move(rec));
    }
  }
  return out;
}

void write_metrics_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << "scenario,method,NI,LI,LI_per_NI,wall_seconds,converged,amg_operator_complexity\n";
  for (const auto& r : records) {
    const SolveMetrics& m = r.metrics;
    out << r.scenario << ',' << r.method << ',' << m.total_newton << ',' << m.total_linear << ','
        << g6(m.li_per_ni()) << ',' << g6(m.wall_seconds) << ',' << (m.converged ? "true" : "false") << ','
        << g6(m.amg_operator_complexity) << '\n';
  }
}

void write_metrics_json(std::ostream& out, const std::vector<RunRecord>& records) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : records) {
    const SolveMetrics& m = r.metrics;
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : m.steps) {
      steps.push_back({{"index", s.index},
                       {"time", s.time},
                       {"dt", s.dt},
                       {"NI", s.newton_iterations},
                       {"LI", s.linear_iterations},
                       {"wall_seconds", s.wall_seconds},
                       {"cut", s.cut},
                       {"linear_per_newton", s.linear_per_newton},
                       {"floor_limited_solves", s.floor_limited_solves},
                       {"residual_norms", s.residual_norms},
                       {"amg_operator_complexity", s.amg_operator_complexity}});
    }
    rows.push_back({{"scenario", r.scenario},
                    {"method", r.method},
                    {"NI", m.total_newton},
                    {"LI", m.total_linear},
                    {"LI_per_NI", m.li_per_ni()},
                    {"NI_per_step", m.ni_per_step()},
                    {"wall_seconds", m.wall_seconds},
                    {"converged", m.converged},
                    {"failure_reason", m.failure_reason},
                    {"step_cut_count", m.step_cut_count},
                    {"floor_limited_solves", m.floor_limited_solves},
                    {"amg_operator_complexity", m.amg_operator_complexity},
                    {"steps", steps}});
  }
  out << rows.dump(2) << '\n';
}

BlockJacobian capture_jacobian(const Scenario& scenario, int newton_index) {
  if (newton_index < 0) throw ValidationError("spectrum: Newton index must be >= 0");
  const TwoPhaseProblem problem = build_problem(scenario);
  PreconditionerSpec spec = scenario.preconditioner;
  spec.kind = PreconditionerKind::ExactJacobian;
  std::optional<BlockJacobian> captured;
  const JacobianObserver observer = [&](int k, const BlockJacobian& jac, const Preconditioner&) {
    if (k == newton_index) captured = jac;
  };
  NewtonParams params = scenario.newton;
  params.max_newton = std::max(params.max_newton, newton_index + 1);
  const double dt = std::min(scenario.dt, scenario.t_final);
  try {
    newton_step(problem, initial_state(scenario), dt, spec, params, observer);
  } catch (const SolverError&) {
    if (!captured) throw;
  }
  if (!captured)
    throw ValidationError("spectrum: Newton converged before iteration " + std::to_string(newton_index));
  return *captured;
}

std::vector<std::complex<double>> preconditioned_spectrum(const BlockJacobian& jac, const Scenario& scenario,
                                                          PreconditionerKind method,
                                                          const SpectrumOptions& options) {
  if (jac.coupled().rows() > options.max_dimension)
    throw ValidationError("spectrum: " + std::to_string(jac.coupled().rows()) + " unknowns exceed the cap of " +
                          std::to_string(options.max_dimension));
  PreconditionerSpec spec = scenario.preconditioner;
  spec.kind = method;
  spec.inner = InnerSolve::Exact;
  const auto m = make_preconditioner(jac, spec);
  const MatrixOperator j(jac.coupled());
  return dense_spectrum(ComposedOperator(j, *m), options);
}

void write_spectrum_csv(std::ostream& out, const std::vector<std::complex<double>>& eigenvalues) {
  char buf[64];
  out << "re,im\n";
  for (const auto& z : eigenvalues) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", z.real(), z.imag());
    out << buf;
  }
}

void write_state_csv(std::ostream& out, const Grid& grid, const State& state) {
  char buf[96];
  out << "cell,i,j,k,p_w,s_n\n";
  for (int c = 0; c < state.num_cells(); ++c) {
    const auto ijk = grid.ijk(c);
    std::snprintf(buf, sizeof buf, "%d,%d,%d,%d,%.17g,%.17g\n", c, ijk[0], ijk[1], ijk[2], state.p_w[c],
                  state.s_n[c]);
    out << buf;
  }
}

}  // namespace twophase
