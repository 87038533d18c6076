#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "twophase/rockfluid.hpp"

namespace twophase {

/// All whitespace-separated numbers of an SPE10-layout ASCII file. A
/// non-numeric token raises ParseError with its line and token position.
std::vector<double> read_spe10_values(const std::filesystem::path& path);

/// Extracts the slab [origin, origin + extent) from SPE10-layout files whose
/// full dimensions are `file_dims`. The permeability file holds either three
/// x-fastest blocks (kx, ky, kz) or a single block used for all directions,
/// in millidarcy. An empty `poro_path` fills porosity with `default_porosity`.
RockProps load_spe10_slab(const std::filesystem::path& perm_path, const std::filesystem::path& poro_path,
                          const std::array<int, 3>& file_dims, const std::array<int, 3>& origin,
                          const std::array<int, 3>& extent, double default_porosity = 0.2);

/// Independent lognormal samples, ln v ~ N(ln geometric_mean, log_std^2),
/// drawn in x-fastest order from a seeded 64-bit Mersenne twister.
std::vector<double> lognormal_field(int count, double geometric_mean, double log_std, std::uint64_t seed);

struct SyntheticSpe10Options {
  std::array<int, 3> dims{60, 220, 85};
  double geometric_mean_md = 100.0;
  double log_std = 1.0;
  double vertical_ratio = 0.1;  // kz / kx
  double porosity = 0.2;
  double porosity_spread = 0.0;  // uniform +- spread around porosity
  std::uint64_t seed = 1;
};

/// Writes a permeability file (kx, ky, kz blocks, mD) and a porosity file
/// in SPE10 layout.
void write_synthetic_spe10(const std::filesystem::path& perm_path, const std::filesystem::path& poro_path,
                           const SyntheticSpe10Options& options);

}  // namespace twophase
