#pragma once

#include <cstdint>
#include <vector>

namespace cubosc {

// How the white noise enters the force: sigma dB or sigma x dB.
enum class NoiseMode { additive, multiplicative };

namespace brownian {

// Uniform grid t_k = k dt for k = 0..n_steps.
struct TimeGrid {
  double dt = 0.0;
  int n_steps = 0;

  double t(int k) const { return dt * static_cast<double>(k); }
  double t_end() const { return dt * static_cast<double>(n_steps); }
  std::size_t size() const { return static_cast<std::size_t>(n_steps) + 1; }

  // Grid covering [0, t_end] with the step count rounded to the nearest
  // integer, never below one step.
  static TimeGrid from_duration(double t_end, double dt);
};

// One Brownian path sampled on a uniform grid: b[k] = B(t_k), b[0] = 0.
struct BrownianPath {
  TimeGrid grid;
  std::vector<double> b;

  std::vector<double> increments() const;  // db[k] = b[k+1] - b[k]
};

// SplitMix64 mixing round; used to derive decorrelated per-path seeds from a
// single base seed so ensembles are reproducible path by path.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t path_seed(std::uint64_t base_seed, std::uint64_t path_index);

BrownianPath sample_brownian(const TimeGrid& grid, std::uint64_t seed);

}  // namespace brownian
}  // namespace cubosc
