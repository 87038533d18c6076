#include "twophase/scenario.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "twophase/errors.hpp"
#include "twophase/spe10.hpp"

namespace twophase {

namespace {

struct UnitEntry {
  const char* name;
  double factor;
};

const std::map<Quantity, std::vector<UnitEntry>>& unit_table() {
  static const std::map<Quantity, std::vector<UnitEntry>> table = {
      {Quantity::Dimensionless, {}},
      {Quantity::Length, {{"m", 1.0}, {"cm", 0.01}, {"ft", 0.3048}}},
      {Quantity::Pressure, {{"Pa", 1.0}, {"kPa", 1e3}, {"MPa", 1e6}, {"bar", 1e5}, {"psi", 6894.757293168361}}},
      {Quantity::Density, {{"kg/m3", 1.0}}},
      {Quantity::Viscosity, {{"Pa.s", 1.0}, {"cP", units::centipoise}}},
      {Quantity::Permeability, {{"m2", 1.0}, {"mD", units::millidarcy}, {"D", 1e3 * units::millidarcy}}},
      {Quantity::Time, {{"s", 1.0}, {"h", 3600.0}, {"day", units::day}, {"days", units::day}}},
      {Quantity::VolumetricRate, {{"m3/s", 1.0}, {"m3/day", 1.0 / units::day}}},
      {Quantity::Acceleration, {{"m/s2", 1.0}}},
  };
  return table;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

bool parse_double(const std::string& s, double& v) {
  if (s.empty()) return false;
  char* end = nullptr;
  errno = 0;
  v = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && errno != ERANGE;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Line numbers of sections and keys, for error messages.
class LineIndex {
 public:
  explicit LineIndex(const std::string& text) {
    std::istringstream in(text);
    std::string line, section;
    for (int no = 1; std::getline(in, line); ++no) {
      const std::string t = trim(line);
      if (t.empty() || t[0] == '#' || t[0] == ';') continue;
      if (t.front() == '[' && t.back() == ']') {
        section = trim(t.substr(1, t.size() - 2));
        lines_[section] = no;
      } else if (auto eq = t.find('='); eq != std::string::npos) {
        lines_[section + '\n' + trim(t.substr(0, eq))] = no;
      }
    }
  }
  int section(const std::string& s) const { return find(s); }
  int key(const std::string& s, const std::string& k) const { return find(s + '\n' + k); }

 private:
  int find(const std::string& k) const {
    auto it = lines_.find(k);
    return it == lines_.end() ? 0 : it->second;
  }
  std::map<std::string, int> lines_;
};

class Section {
 public:
  Section(std::string name, const boost::property_tree::ptree* tree, const LineIndex& lines)
      : name_(std::move(name)), tree_(tree), lines_(lines) {}

  bool has(const std::string& key) const { return tree_ && tree_->find(key) != tree_->not_found(); }

  std::string raw(const std::string& key) {
    used_.insert(key);
    return trim(tree_->get<std::string>(key));
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    throw ParseError("[" + name_ + "] " + key + ": " + msg, lines_.key(name_, key));
  }

  std::string text(const std::string& key, const std::string& fallback) {
    return has(key) ? raw(key) : fallback;
  }
  std::string required_text(const std::string& key) {
    if (!has(key)) missing(key);
    return raw(key);
  }
  double quantity(const std::string& key, Quantity q, double fallback) {
    return has(key) ? to_quantity(key, q) : fallback;
  }
  double required_quantity(const std::string& key, Quantity q) {
    if (!has(key)) missing(key);
    return to_quantity(key, q);
  }
  long integer(const std::string& key, long fallback) {
    if (!has(key)) return fallback;
    const std::string s = raw(key);
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) fail(key, "expected an integer, got '" + s + "'");
    return v;
  }
  long required_integer(const std::string& key) {
    if (!has(key)) missing(key);
    return integer(key, 0);
  }
  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const std::string s = raw(key);
    if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
    if (s == "false" || s == "no" || s == "0" || s == "off") return false;
    fail(key, "expected true or false, got '" + s + "'");
  }
  std::array<int, 3> triple(const std::string& key, std::array<int, 3> fallback) {
    if (!has(key)) return fallback;
    const auto toks = split_ws(raw(key));
    if (toks.size() != 3) fail(key, "expected three integers");
    std::array<int, 3> out{};
    for (int d = 0; d < 3; ++d) {
      char* end = nullptr;
      out[d] = static_cast<int>(std::strtol(toks[d].c_str(), &end, 10));
      if (end != toks[d].c_str() + toks[d].size()) fail(key, "expected three integers");
    }
    return out;
  }

  // "i0:i1 j0:j1 k0:k1" with inclusive ranges; "*" selects a whole axis and a
  // single number a single layer.
  CellBox box(const std::string& key, const GridSpec& g) {
    CellBox b = g.full_box();
    if (!has(key)) return b;
    const auto toks = split_ws(raw(key));
    if (toks.size() != 3) fail(key, "expected three ranges like 0:4 * 2");
    for (int d = 0; d < 3; ++d) {
      const std::string& t = toks[d];
      if (t == "*") continue;
      const auto colon = t.find(':');
      const std::string a = t.substr(0, colon), c = colon == std::string::npos ? a : t.substr(colon + 1);
      double lo, hi;
      if (!parse_double(a, lo) || !parse_double(c, hi) || lo != std::floor(lo) || hi != std::floor(hi))
        fail(key, "bad range '" + t + "'");
      b.lo[d] = static_cast<int>(lo);
      b.hi[d] = static_cast<int>(hi);
    }
    return b;
  }

  void check_unused() const {
    if (!tree_) return;
    for (const auto& [k, v] : *tree_)
      if (!used_.count(k)) fail(k, "unknown key");
  }

 private:
  [[noreturn]] void missing(const std::string& key) const {
    throw ParseError("[" + name_ + "] missing required key '" + key + "'", lines_.section(name_));
  }
  double to_quantity(const std::string& key, Quantity q) {
    const std::string s = raw(key);
    try {
      return parse_quantity(s, q);
    } catch (const ValidationError& e) {
      fail(key, e.what());
    }
  }

  std::string name_;
  const boost::property_tree::ptree* tree_;
  const LineIndex& lines_;
  std::set<std::string> used_;
};

std::optional<Ordering> parse_ordering(const std::string& s) {
  if (s == "blocked") return Ordering::VariableBlocked;
  if (s == "point") return Ordering::PointInterleaved;
  return std::nullopt;
}

const char* ordering_name(Ordering o) { return o == Ordering::VariableBlocked ? "blocked" : "point"; }

void read_amg(Section& sec, const std::string& prefix, AmgOptions& o) {
  o.strength_threshold = sec.quantity(prefix + "strength_threshold", Quantity::Dimensionless, o.strength_threshold);
  o.max_row_sum = sec.quantity(prefix + "max_row_sum", Quantity::Dimensionless, o.max_row_sum);
  o.num_functions = static_cast<int>(sec.integer(prefix + "num_functions", o.num_functions));
  o.max_levels = static_cast<int>(sec.integer(prefix + "max_levels", o.max_levels));
  o.coarse_size = static_cast<int>(sec.integer(prefix + "coarse_size", o.coarse_size));
  o.cycles = static_cast<int>(sec.integer(prefix + "cycles", o.cycles));
  o.pre_sweeps = static_cast<int>(sec.integer(prefix + "pre_sweeps", o.pre_sweeps));
  o.post_sweeps = static_cast<int>(sec.integer(prefix + "post_sweeps", o.post_sweeps));
}

void write_amg(std::ostream& out, const std::string& prefix, const AmgOptions& o) {
  out << prefix << "strength_threshold = " << fmt(o.strength_threshold) << '\n'
      << prefix << "max_row_sum = " << fmt(o.max_row_sum) << '\n'
      << prefix << "num_functions = " << o.num_functions << '\n'
      << prefix << "max_levels = " << o.max_levels << '\n'
      << prefix << "coarse_size = " << o.coarse_size << '\n'
      << prefix << "cycles = " << o.cycles << '\n'
      << prefix << "pre_sweeps = " << o.pre_sweeps << '\n'
      << prefix << "post_sweeps = " << o.post_sweeps << '\n';
}

std::string box_text(const CellBox& b) {
  std::string s;
  for (int d = 0; d < 3; ++d) {
    if (d) s += ' ';
    s += std::to_string(b.lo[d]) + ':' + std::to_string(b.hi[d]);
  }
  return s;
}

void check_box(const CellBox& b, const GridSpec& g, const std::string& what) {
  const std::array<int, 3> n{g.nx, g.ny, g.nz};
  for (int d = 0; d < 3; ++d)
    if (b.lo[d] < 0 || b.hi[d] >= n[d] || b.lo[d] > b.hi[d])
      throw ValidationError(what + ": cell range outside the grid or empty");
}

}  // namespace

double parse_quantity(const std::string& text, Quantity q) {
  const auto toks = split_ws(text);
  if (toks.empty() || toks.size() > 2) throw ValidationError("expected '<number> [unit]', got '" + text + "'");
  double v;
  if (!parse_double(toks[0], v) || !std::isfinite(v)) throw ValidationError("not a number: '" + toks[0] + "'");
  if (toks.size() == 1) return v;
  for (const auto& u : unit_table().at(q))
    if (toks[1] == u.name) return v * u.factor;
  std::string allowed;
  for (const auto& u : unit_table().at(q)) allowed += std::string(allowed.empty() ? "" : ", ") + u.name;
  throw ValidationError("unit '" + toks[1] + "' not allowed here" +
                        (allowed.empty() ? std::string(" (dimensionless)") : " (allowed: " + allowed + ")"));
}

bool CellBox::contains(const std::array<int, 3>& ijk) const {
  for (int d = 0; d < 3; ++d)
    if (ijk[d] < lo[d] || ijk[d] > hi[d]) return false;
  return true;
}

void Scenario::validate() const {
  if (name.empty()) throw ValidationError("scenario name must not be empty");
  if (grid.nx < 1 || grid.ny < 1 || grid.nz < 1) throw ValidationError("grid: cell counts must be >= 1");
  if (!(grid.lx > 0 && grid.ly > 0 && grid.lz > 0)) throw ValidationError("grid: lengths must be positive");
  fluid.validate();
  if (!(porosity > 0.0 && porosity <= 1.0)) throw ValidationError("rock: porosity must be in (0, 1]");
  if (s_wr < 0.0 || s_nr < 0.0 || s_wr + s_nr >= 1.0)
    throw ValidationError("rock: residual saturations must be >= 0 with s_wr + s_nr < 1");
  if (const auto* u = std::get_if<UniformPermeability>(&permeability)) {
    for (double k : u->k)
      if (!(k > 0.0)) throw ValidationError("rock: permeability must be positive");
  } else if (const auto* l = std::get_if<LognormalPermeability>(&permeability)) {
    if (!(l->geometric_mean > 0.0)) throw ValidationError("rock: geometric_mean must be positive");
    if (!(l->log_std >= 0.0)) throw ValidationError("rock: log_std must be >= 0");
    if (!(l->vertical_ratio > 0.0)) throw ValidationError("rock: vertical_ratio must be positive");
  } else {
    const auto& s = std::get<Spe10Permeability>(permeability);
    if (!std::filesystem::exists(s.perm_path)) throw ValidationError("rock: file not found: " + s.perm_path);
    if (!s.poro_path.empty() && !std::filesystem::exists(s.poro_path))
      throw ValidationError("rock: file not found: " + s.poro_path);
    const std::array<int, 3> n{grid.nx, grid.ny, grid.nz};
    for (int d = 0; d < 3; ++d)
      if (s.origin[d] < 0 || s.origin[d] + n[d] > s.file_dims[d])
        throw ValidationError("rock: SPE10 slab origin + grid extent exceeds file_dims");
  }
  capillary.validate();
  if (const auto* c = std::get_if<CoreyRelPerm>(&relperm); c && !(c->lambda > 0.0))
    throw ValidationError("relperm: Corey lambda must be positive");
  if (!(initial_s_n >= 0.0 && initial_s_n <= 1.0)) throw ValidationError("initial: s_n must be in [0, 1]");
  if (!std::isfinite(initial_p_w)) throw ValidationError("initial: p_w must be finite");
  std::set<std::string> names;
  for (const auto& b : boundaries) {
    if (!names.insert("bc:" + b.name).second) throw ValidationError("duplicate boundary name '" + b.name + "'");
    check_box(b.box, grid, "bc:" + b.name);
    if (const auto* d = std::get_if<DirichletPressureSaturation>(&b.condition)) {
      if (!(d->s_w >= 0.0 && d->s_w <= 1.0)) throw ValidationError("bc:" + b.name + ": s_w must be in [0, 1]");
      if (!std::isfinite(d->p_w)) throw ValidationError("bc:" + b.name + ": p_w must be finite");
    } else if (const auto* nf = std::get_if<NeumannTotalFlux>(&b.condition)) {
      if (!(nf->s_w_inflow >= 0.0 && nf->s_w_inflow <= 1.0))
        throw ValidationError("bc:" + b.name + ": s_w must be in [0, 1]");
      if (!std::isfinite(nf->rate)) throw ValidationError("bc:" + b.name + ": rate must be finite");
    }
  }
  for (const auto& s : sources) {
    if (!names.insert("source:" + s.name).second) throw ValidationError("duplicate source name '" + s.name + "'");
    check_box(s.box, grid, "source:" + s.name);
    if (!std::isfinite(s.rate)) throw ValidationError("source:" + s.name + ": rate must be finite");
  }
  if (!(dt > 0.0)) throw ValidationError("time: dt must be positive");
  if (!(t_final > 0.0)) throw ValidationError("time: t_final must be positive");
  preconditioner.validate();
  newton.validate();
  if (output.snapshot_every < 0) throw ValidationError("output: snapshot_every must be >= 0");
}

Scenario parse_scenario(std::istream& in, const std::filesystem::path& base_dir) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  const LineIndex lines(text);
  boost::property_tree::ptree pt;
  try {
    std::istringstream ss(text);
    boost::property_tree::read_ini(ss, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ParseError(e.message(), static_cast<int>(e.line()));
  }

  auto child = [&](const std::string& name) -> const boost::property_tree::ptree* {
    auto it = pt.find(name);
    return it == pt.not_found() ? nullptr : &it->second;
  };
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
    return path.lexically_normal().string();
  };

  Scenario s;
  std::set<std::string> known;
  auto section = [&](const std::string& name) {
    known.insert(name);
    return Section(name, child(name), lines);
  };

  {
    Section sec = section("scenario");
    s.name = sec.text("name", s.name);
    sec.check_unused();
  }
  {
    if (!child("grid")) throw ParseError("missing [grid] section");
    Section sec = section("grid");
    s.grid.nx = static_cast<int>(sec.required_integer("nx"));
    s.grid.ny = static_cast<int>(sec.integer("ny", 1));
    s.grid.nz = static_cast<int>(sec.integer("nz", 1));
    s.grid.lx = sec.required_quantity("lx", Quantity::Length);
    s.grid.ly = sec.quantity("ly", Quantity::Length, 1.0);
    s.grid.lz = sec.quantity("lz", Quantity::Length, 1.0);
    const std::string g = sec.text("gravity", "none");
    if (g != "none") {
      s.grid.gravity_axis = parse_axis(g);
      if (!s.grid.gravity_axis) sec.fail("gravity", "expected x, y, z or none");
    }
    sec.check_unused();
  }
  {
    Section sec = section("fluid");
    s.fluid.rho_w = sec.quantity("rho_w", Quantity::Density, s.fluid.rho_w);
    s.fluid.rho_n = sec.quantity("rho_n", Quantity::Density, s.fluid.rho_n);
    s.fluid.mu_w = sec.quantity("mu_w", Quantity::Viscosity, s.fluid.mu_w);
    s.fluid.mu_n = sec.quantity("mu_n", Quantity::Viscosity, s.fluid.mu_n);
    s.fluid.g = sec.quantity("g", Quantity::Acceleration, s.fluid.g);
    sec.check_unused();
  }
  {
    Section sec = section("rock");
    s.porosity = sec.quantity("porosity", Quantity::Dimensionless, s.porosity);
    s.s_wr = sec.quantity("s_wr", Quantity::Dimensionless, s.s_wr);
    s.s_nr = sec.quantity("s_nr", Quantity::Dimensionless, s.s_nr);
    const std::string kind = sec.text("permeability", "uniform");
    if (kind == "uniform") {
      UniformPermeability u;
      const double k = sec.quantity("perm", Quantity::Permeability, 100.0 * units::millidarcy);
      u.k = {sec.quantity("kx", Quantity::Permeability, k), sec.quantity("ky", Quantity::Permeability, k),
             sec.quantity("kz", Quantity::Permeability, k)};
      s.permeability = u;
    } else if (kind == "lognormal") {
      LognormalPermeability l;
      l.geometric_mean = sec.required_quantity("geometric_mean", Quantity::Permeability);
      l.log_std = sec.quantity("log_std", Quantity::Dimensionless, l.log_std);
      l.seed = static_cast<std::uint64_t>(sec.integer("seed", static_cast<long>(l.seed)));
      l.vertical_ratio = sec.quantity("vertical_ratio", Quantity::Dimensionless, l.vertical_ratio);
      s.permeability = l;
    } else if (kind == "spe10") {
      Spe10Permeability f;
      f.perm_path = resolve(sec.required_text("perm_file"));
      if (sec.has("poro_file")) f.poro_path = resolve(sec.raw("poro_file"));
      f.file_dims = sec.triple("file_dims", f.file_dims);
      f.origin = sec.triple("origin", f.origin);
      s.permeability = f;
    } else {
      sec.fail("permeability", "expected uniform, lognormal or spe10");
    }
    sec.check_unused();
  }
  {
    Section sec = section("capillary");
    const std::string model = sec.text("model", "linear");
    if (model == "linear") {
      s.capillary.law = LinearCapillary{sec.quantity("p0", Quantity::Pressure, 0.0)};
    } else if (model == "brooks-corey") {
      s.capillary.law = BrooksCoreyCapillary{sec.required_quantity("pd", Quantity::Pressure),
                                             sec.required_quantity("lambda", Quantity::Dimensionless)};
    } else {
      sec.fail("model", "expected linear or brooks-corey");
    }
    s.capillary.epsilon_s = sec.quantity("epsilon_s", Quantity::Dimensionless, s.capillary.epsilon_s);
    sec.check_unused();
  }
  {
    Section sec = section("relperm");
    const std::string model = sec.text("model", "quadratic");
    if (model == "quadratic") s.relperm = QuadraticRelPerm{};
    else if (model == "corey") s.relperm = CoreyRelPerm{sec.required_quantity("lambda", Quantity::Dimensionless)};
    else sec.fail("model", "expected quadratic or corey");
    sec.check_unused();
  }
  {
    Section sec = section("initial");
    s.initial_p_w = sec.quantity("p_w", Quantity::Pressure, s.initial_p_w);
    s.initial_s_n = sec.quantity("s_n", Quantity::Dimensionless, s.initial_s_n);
    sec.check_unused();
  }
  {
    if (!child("time")) throw ParseError("missing [time] section");
    Section sec = section("time");
    s.dt = sec.required_quantity("dt", Quantity::Time);
    s.t_final = sec.required_quantity("t_final", Quantity::Time);
    sec.check_unused();
  }
  {
    Section sec = section("solver");
    NewtonParams& n = s.newton;
    n.abs_tol = sec.quantity("abs_tol", Quantity::Dimensionless, n.abs_tol);
    n.max_newton = static_cast<int>(sec.integer("max_newton", n.max_newton));
    n.linear_rel_tol = sec.quantity("linear_rel_tol", Quantity::Dimensionless, n.linear_rel_tol);
    n.linear_max_iters = static_cast<int>(sec.integer("linear_max_iters", n.linear_max_iters));
    n.restart = static_cast<int>(sec.integer("restart", n.restart));
    n.attainable_factor = sec.quantity("attainable_factor", Quantity::Dimensionless, n.attainable_factor);
    n.line_search = sec.boolean("line_search", n.line_search);
    n.scaled_norm = sec.boolean("scaled_norm", n.scaled_norm);
    if (sec.has("ordering")) {
      auto o = parse_ordering(sec.raw("ordering"));
      if (!o) sec.fail("ordering", "expected blocked or point");
      n.ordering = *o;
    }
    sec.check_unused();
  }
  {
    Section sec = section("preconditioner");
    PreconditionerSpec& p = s.preconditioner;
    if (sec.has("method")) {
      auto k = parse_preconditioner_kind(sec.raw("method"));
      if (!k) sec.fail("method", "expected amg, cpr-amg1, cpr-amg2, bf or exact");
      p.kind = *k;
    }
    const std::string inner = sec.text("inner", "amg");
    if (inner == "amg") p.inner = InnerSolve::AmgVCycle;
    else if (inner == "exact") p.inner = InnerSolve::Exact;
    else sec.fail("inner", "expected amg or exact");
    if (sec.has("ilu_ordering")) {
      auto o = parse_ordering(sec.raw("ilu_ordering"));
      if (!o) sec.fail("ilu_ordering", "expected blocked or point");
      p.ilu_ordering = *o;
    }
    const std::string schur = sec.text("schur", "simple");
    if (schur == "simple") p.schur_as_printed = false;
    else if (schur == "as-printed") p.schur_as_printed = true;
    else sec.fail("schur", "expected simple or as-printed");
    read_amg(sec, "", p.scalar_amg);
    read_amg(sec, "coupled_", p.coupled_amg);
    sec.check_unused();
  }
  {
    Section sec = section("output");
    s.output.directory = sec.text("directory", s.output.directory);
    s.output.snapshot_every = static_cast<int>(sec.integer("snapshot_every", s.output.snapshot_every));
    sec.check_unused();
  }

  for (const auto& [name, tree] : pt) {
    if (known.count(name)) continue;
    const int line = lines.section(name);
    if (name.rfind("bc:", 0) == 0) {
      Section sec(name, &tree, lines);
      BoundarySpec b;
      b.name = name.substr(3);
      const std::string side = sec.required_text("side");
      auto sd = parse_side(side);
      if (!sd) sec.fail("side", "expected xmin, xmax, ymin, ymax, zmin or zmax");
      b.side = *sd;
      b.box = sec.box("cells", s.grid);
      const std::string type = sec.required_text("type");
      if (type == "dirichlet") {
        b.condition = DirichletPressureSaturation{sec.required_quantity("p_w", Quantity::Pressure),
                                                  sec.required_quantity("s_w", Quantity::Dimensionless)};
      } else if (type == "neumann") {
        b.condition = NeumannTotalFlux{sec.required_quantity("rate", Quantity::VolumetricRate),
                                       sec.quantity("s_w", Quantity::Dimensionless, 1.0)};
      } else if (type == "noflow") {
        b.condition = NoFlow{};
      } else {
        sec.fail("type", "expected dirichlet, neumann or noflow");
      }
      sec.check_unused();
      s.boundaries.push_back(std::move(b));
    } else if (name.rfind("source:", 0) == 0) {
      Section sec(name, &tree, lines);
      SourceSpec src;
      src.name = name.substr(7);
      src.box = sec.box("cells", s.grid);
      const std::string phase = sec.required_text("phase");
      if (phase == "water" || phase == "wetting") src.phase = Phase::Wetting;
      else if (phase == "oil" || phase == "nonwetting") src.phase = Phase::NonWetting;
      else sec.fail("phase", "expected water or oil");
      src.rate = sec.required_quantity("rate", Quantity::VolumetricRate);
      sec.check_unused();
      s.sources.push_back(std::move(src));
    } else {
      throw ParseError("unknown section [" + name + "]", line);
    }
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return parse_scenario(in, path.parent_path());
}

void write_scenario(std::ostream& out, const Scenario& s) {
  out << "[scenario]\nname = " << s.name << "\n\n";
  out << "[grid]\nnx = " << s.grid.nx << "\nny = " << s.grid.ny << "\nnz = " << s.grid.nz << '\n'
      << "lx = " << fmt(s.grid.lx) << " m\nly = " << fmt(s.grid.ly) << " m\nlz = " << fmt(s.grid.lz) << " m\n"
      << "gravity = " << (s.grid.gravity_axis ? std::string(to_string(*s.grid.gravity_axis)) : "none") << "\n\n";
  out << "[fluid]\nrho_w = " << fmt(s.fluid.rho_w) << " kg/m3\nrho_n = " << fmt(s.fluid.rho_n) << " kg/m3\n"
      << "mu_w = " << fmt(s.fluid.mu_w) << " Pa.s\nmu_n = " << fmt(s.fluid.mu_n) << " Pa.s\n"
      << "g = " << fmt(s.fluid.g) << " m/s2\n\n";
  out << "[rock]\nporosity = " << fmt(s.porosity) << "\ns_wr = " << fmt(s.s_wr) << "\ns_nr = " << fmt(s.s_nr)
      << '\n';
  if (const auto* u = std::get_if<UniformPermeability>(&s.permeability)) {
    out << "permeability = uniform\nkx = " << fmt(u->k[0]) << " m2\nky = " << fmt(u->k[1]) << " m2\nkz = "
        << fmt(u->k[2]) << " m2\n";
  } else if (const auto* l = std::get_if<LognormalPermeability>(&s.permeability)) {
    out << "permeability = lognormal\ngeometric_mean = " << fmt(l->geometric_mean) << " m2\nlog_std = "
        << fmt(l->log_std) << "\nseed = " << l->seed << "\nvertical_ratio = " << fmt(l->vertical_ratio) << '\n';
  } else {
    const auto& f = std::get<Spe10Permeability>(s.permeability);
    out << "permeability = spe10\nperm_file = " << f.perm_path << '\n';
    if (!f.poro_path.empty()) out << "poro_file = " << f.poro_path << '\n';
    out << "file_dims = " << f.file_dims[0] << ' ' << f.file_dims[1] << ' ' << f.file_dims[2] << '\n'
        << "origin = " << f.origin[0] << ' ' << f.origin[1] << ' ' << f.origin[2] << '\n';
  }
  out << "\n[capillary]\n";
  if (const auto* lin = std::get_if<LinearCapillary>(&s.capillary.law))
    out << "model = linear\np0 = " << fmt(lin->p0) << " Pa\n";
  else {
    const auto& bc = std::get<BrooksCoreyCapillary>(s.capillary.law);
    out << "model = brooks-corey\npd = " << fmt(bc.pd) << " Pa\nlambda = " << fmt(bc.lambda) << '\n';
  }
  out << "epsilon_s = " << fmt(s.capillary.epsilon_s) << "\n\n[relperm]\n";
  if (const auto* c = std::get_if<CoreyRelPerm>(&s.relperm))
    out << "model = corey\nlambda = " << fmt(c->lambda) << '\n';
  else
    out << "model = quadratic\n";
  out << "\n[initial]\np_w = " << fmt(s.initial_p_w) << " Pa\ns_n = " << fmt(s.initial_s_n) << "\n\n";
  out << "[time]\ndt = " << fmt(s.dt) << " s\nt_final = " << fmt(s.t_final) << " s\n\n";
  const NewtonParams& n = s.newton;
  out << "[solver]\nabs_tol = " << fmt(n.abs_tol) << "\nmax_newton = " << n.max_newton
      << "\nlinear_rel_tol = " << fmt(n.linear_rel_tol) << "\nlinear_max_iters = " << n.linear_max_iters
      << "\nrestart = " << n.restart << "\nattainable_factor = " << fmt(n.attainable_factor) << "\nline_search = " << (n.line_search ? "true" : "false")
      << "\nscaled_norm = " << (n.scaled_norm ? "true" : "false") << "\nordering = " << ordering_name(n.ordering)
      << "\n\n";
  const PreconditionerSpec& p = s.preconditioner;
  out << "[preconditioner]\nmethod = " << to_string(p.kind)
      << "\ninner = " << (p.inner == InnerSolve::Exact ? "exact" : "amg")
      << "\nilu_ordering = " << ordering_name(p.ilu_ordering)
      << "\nschur = " << (p.schur_as_printed ? "as-printed" : "simple") << '\n';
  write_amg(out, "", p.scalar_amg);
  write_amg(out, "coupled_", p.coupled_amg);
  out << "\n[output]\ndirectory = " << s.output.directory << "\nsnapshot_every = " << s.output.snapshot_every
      << '\n';
  for (const auto& b : s.boundaries) {
    out << "\n[bc:" << b.name << "]\nside = " << to_string(b.side) << "\ncells = " << box_text(b.box) << '\n';
    if (const auto* d = std::get_if<DirichletPressureSaturation>(&b.condition))
      out << "type = dirichlet\np_w = " << fmt(d->p_w) << " Pa\ns_w = " << fmt(d->s_w) << '\n';
    else if (const auto* nf = std::get_if<NeumannTotalFlux>(&b.condition))
      out << "type = neumann\nrate = " << fmt(nf->rate) << " m3/s\ns_w = " << fmt(nf->s_w_inflow) << '\n';
    else
      out << "type = noflow\n";
  }
  for (const auto& src : s.sources) {
    out << "\n[source:" << src.name << "]\ncells = " << box_text(src.box)
        << "\nphase = " << (src.phase == Phase::Wetting ? "water" : "oil") << "\nrate = " << fmt(src.rate)
        << " m3/s\n";
  }
}

void save_scenario(const std::filesystem::path& path, const Scenario& s) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  write_scenario(out, s);
}

RockProps build_rock(const Scenario& s) {
  const int n = s.grid.nx * s.grid.ny * s.grid.nz;
  RockProps rock;
  if (const auto* u = std::get_if<UniformPermeability>(&s.permeability)) {
    rock.porosity.assign(n, s.porosity);
    rock.perm.assign(n, u->k);
  } else if (const auto* l = std::get_if<LognormalPermeability>(&s.permeability)) {
    const auto k = lognormal_field(n, l->geometric_mean, l->log_std, l->seed);
    rock.porosity.assign(n, s.porosity);
    rock.perm.resize(n);
    for (int c = 0; c < n; ++c) rock.perm[c] = {k[c], k[c], l->vertical_ratio * k[c]};
  } else {
    const auto& f = std::get<Spe10Permeability>(s.permeability);
    rock = load_spe10_slab(f.perm_path, f.poro_path, f.file_dims, f.origin, {s.grid.nx, s.grid.ny, s.grid.nz},
                           s.porosity);
  }
  rock.s_wr = s.s_wr;
  rock.s_nr = s.s_nr;
  return rock;
}

std::vector<BoundaryCondition> boundary_conditions(const Grid& grid, const std::vector<BoundarySpec>& specs) {
  const auto faces = grid.boundary_faces();
  std::vector<BoundaryCondition> out(faces.size(), NoFlow{});
  for (const auto& spec : specs) {
    std::vector<std::size_t> selected;
    double area = 0.0;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (faces[f].side != spec.side || !spec.box.contains(grid.ijk(faces[f].cell))) continue;
      selected.push_back(f);
      area += faces[f].area;
    }
    if (selected.empty()) throw ValidationError("bc:" + spec.name + ": selects no boundary faces");
    for (std::size_t f : selected) {
      if (const auto* nf = std::get_if<NeumannTotalFlux>(&spec.condition))
        out[f] = NeumannTotalFlux{nf->rate * faces[f].area / area, nf->s_w_inflow};
      else
        out[f] = spec.condition;
    }
  }
  return out;
}

SourceTerm source_term(const Grid& grid, const FluidProps& fluid, const std::vector<SourceSpec>& specs) {
  const int n = grid.num_cells();
  SourceTerm q{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  for (const auto& spec : specs) {
    std::vector<int> cells;
    for (int c = 0; c < n; ++c)
      if (spec.box.contains(grid.ijk(c))) cells.push_back(c);
    const double volume = cells.size() * grid.cell_volume();
    const bool water = spec.phase == Phase::Wetting;
    const double density = (water ? fluid.rho_w : fluid.rho_n) * spec.rate / volume;
    for (int c : cells) (water ? q.q_w : q.q_n)[c] += density;
  }
  return q;
}

TwoPhaseProblem build_problem(const Scenario& s) {
  Grid grid = s.grid.build();
  auto bcs = boundary_conditions(grid, s.boundaries);
  auto q = source_term(grid, s.fluid, s.sources);
  return TwoPhaseProblem(std::move(grid), build_rock(s), s.fluid, s.capillary, s.relperm, std::move(bcs),
                         std::move(q));
}

State initial_state(const Scenario& s) {
  return State::uniform(s.grid.nx * s.grid.ny * s.grid.nz, s.initial_p_w, s.initial_s_n);
}

SimulationConfig simulation_config(const Scenario& s) {
  SimulationConfig c;
  c.dt = s.dt;
  c.t_final = s.t_final;
  c.preconditioner = s.preconditioner;
  c.newton = s.newton;
  c.snapshot_every = s.output.snapshot_every;
  return c;
}

std::filesystem::path output_directory(const Scenario& s) {
  if (const char* env = std::getenv("TWOPHASE_OUTPUT_DIR"); env && *env) return env;
  return s.output.directory;
}

}  // namespace twophase
