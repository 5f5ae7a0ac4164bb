#include "cubosc/brownian.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace cubosc::brownian {

TimeGrid TimeGrid::from_duration(double t_end, double dt) {
  if (!(dt > 0.0)) throw std::domain_error("grid: dt must be positive");
  if (!(t_end > 0.0)) throw std::domain_error("grid: t_end must be positive");
  TimeGrid g;
  g.dt = dt;
  const long long n = std::llround(t_end / dt);
  g.n_steps = static_cast<int>(n < 1 ? 1 : n);
  return g;
}

std::vector<double> BrownianPath::increments() const {
  std::vector<double> db(grid.n_steps);
  for (int k = 0; k < grid.n_steps; ++k) db[static_cast<std::size_t>(k)] = b[k + 1] - b[k];
  return db;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t path_seed(std::uint64_t base_seed, std::uint64_t path_index) {
  return splitmix64(base_seed + 0x9e3779b97f4a7c15ULL * (path_index + 1));
}

BrownianPath sample_brownian(const TimeGrid& grid, std::uint64_t seed) {
  if (!(grid.dt > 0.0) || grid.n_steps < 1)
    throw std::domain_error("sample_brownian: grid must have dt > 0 and at least one step");
  BrownianPath path;
  path.grid = grid;
  path.b.resize(grid.size());
  path.b[0] = 0.0;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(grid.dt));
  for (int k = 0; k < grid.n_steps; ++k)
    path.b[static_cast<std::size_t>(k) + 1] = path.b[static_cast<std::size_t>(k)] + gauss(rng);
  return path;
}

}  // namespace cubosc::brownian
