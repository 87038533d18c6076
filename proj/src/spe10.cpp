#include "twophase/spe10.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "twophase/errors.hpp"

namespace twophase {

std::vector<double> read_spe10_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::vector<double> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(tok.c_str(), &end);
      if (end != tok.c_str() + tok.size() || errno == ERANGE || !std::isfinite(v))
        throw ParseError(path.string() + ": non-numeric token '" + tok + "' at value " +
                             std::to_string(values.size() + 1),
                         line_no);
      values.push_back(v);
    }
  }
  return values;
}

RockProps load_spe10_slab(const std::filesystem::path& perm_path, const std::filesystem::path& poro_path,
                          const std::array<int, 3>& file_dims, const std::array<int, 3>& origin,
                          const std::array<int, 3>& extent, double default_porosity) {
  for (int d = 0; d < 3; ++d) {
    if (file_dims[d] < 1 || extent[d] < 1 || origin[d] < 0)
      throw ValidationError("SPE10 slab: dimensions must be positive and origin non-negative");
    if (origin[d] + extent[d] > file_dims[d])
      throw ValidationError("SPE10 slab: origin + extent exceeds the data set along axis " + std::to_string(d));
  }
  const long n_file = long(file_dims[0]) * file_dims[1] * file_dims[2];
  const std::vector<double> perm = read_spe10_values(perm_path);
  int blocks = 0;
  if (long(perm.size()) >= 3 * n_file) blocks = 3;
  else if (long(perm.size()) == n_file) blocks = 1;
  else
    throw ValidationError(perm_path.string() + ": expected " + std::to_string(3 * n_file) + " or " +
                          std::to_string(n_file) + " values, found " + std::to_string(perm.size()));
  std::vector<double> poro;
  if (!poro_path.empty()) {
    poro = read_spe10_values(poro_path);
    if (long(poro.size()) < n_file)
      throw ValidationError(poro_path.string() + ": expected " + std::to_string(n_file) + " values, found " +
                            std::to_string(poro.size()));
  }

  RockProps rock;
  const int n = extent[0] * extent[1] * extent[2];
  rock.porosity.resize(n, default_porosity);
  rock.perm.resize(n);
  int c = 0;
  for (int k = 0; k < extent[2]; ++k)
    for (int j = 0; j < extent[1]; ++j)
      for (int i = 0; i < extent[0]; ++i, ++c) {
        const long src =
            (origin[0] + i) + long(file_dims[0]) * ((origin[1] + j) + long(file_dims[1]) * (origin[2] + k));
        for (int d = 0; d < 3; ++d)
          rock.perm[c][d] = perm[(blocks == 3 ? d * n_file : 0) + src] * units::millidarcy;
        if (!poro.empty()) rock.porosity[c] = poro[src];
      }
  return rock;
}

std::vector<double> lognormal_field(int count, double geometric_mean, double log_std, std::uint64_t seed) {
  if (!(geometric_mean > 0.0) || !(log_std >= 0.0))
    throw ValidationError("lognormal field: geometric mean must be > 0 and log_std >= 0");
  std::mt19937_64 rng(seed);
  std::lognormal_distribution<double> dist(std::log(geometric_mean), log_std);
  std::vector<double> v(count);
  for (double& x : v) x = log_std == 0.0 ? geometric_mean : dist(rng);
  return v;
}

void write_synthetic_spe10(const std::filesystem::path& perm_path, const std::filesystem::path& poro_path,
                           const SyntheticSpe10Options& o) {
  const int n = o.dims[0] * o.dims[1] * o.dims[2];
  if (n <= 0) throw ValidationError("synthetic SPE10: dimensions must be positive");
  const auto kx = lognormal_field(n, o.geometric_mean_md, o.log_std, o.seed);
  std::mt19937_64 rng(o.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> spread(-o.porosity_spread, o.porosity_spread);

  auto write_block = [](std::ostream& out, const std::vector<double>& v, double scale) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      out << v[i] * scale << ((i % 6 == 5 || i + 1 == v.size()) ? '\n' : '\t');
    }
  };
  std::ofstream perm(perm_path);
  if (!perm) throw ValidationError("cannot write " + perm_path.string());
  perm.precision(10);
  write_block(perm, kx, 1.0);
  write_block(perm, kx, 1.0);
  write_block(perm, kx, o.vertical_ratio);

  std::vector<double> phi(n);
  for (double& p : phi) p = o.porosity + (o.porosity_spread > 0.0 ? spread(rng) : 0.0);
  std::ofstream poro(poro_path);
  if (!poro) throw ValidationError("cannot write " + poro_path.string());
  poro.precision(10);
  write_block(poro, phi, 1.0);
}

}  // namespace twophase
