#pragma once

#include <vector>

#include "cubosc/brownian.hpp"
#include "cubosc/elliptic.hpp"
#include "cubosc/oscillator.hpp"

namespace cubosc::sde {

// Trajectory of the second-order system on the path's grid.  The cubic force
// makes escape past the well explosive; a run crossing the threshold keeps
// the first out-of-threshold sample, drops everything after it and is
// flagged.  Exploded runs are data, not errors.
struct SdeRunResult {
  brownian::TimeGrid grid;
  std::vector<double> x;
  std::vector<double> xi;
  bool exploded = false;
  int blowup_index = -1;  // index of the first sample past the threshold
};

// One-step scheme for dx = xi dt, dxi = (x^2 - B) dt + sigma dB (additive)
// or sigma x dB (multiplicative), started on the orbit at
// (y, initial_velocity).  The force kick is split symmetrically around the
// position update with the diffusion frozen at the left endpoint, so the
// noise handling is Euler-Maruyama (strong order 1 for additive noise) while
// the sigma = 0 flow is velocity Verlet.
SdeRunResult euler_maruyama(const oscillator::OscillatorParams& p, double sigma,
                            const brownian::BrownianPath& path,
                            NoiseMode mode = NoiseMode::additive,
                            double explosion_threshold = 1e6);

// Same scheme from arbitrary initial data.
SdeRunResult euler_maruyama_from(double x_init, double xi_init, double big_b, double sigma,
                                 const brownian::BrownianPath& path,
                                 NoiseMode mode = NoiseMode::additive,
                                 double explosion_threshold = 1e6);

// Classical RK4 for the unperturbed equation x'' = x^2 - B.
SdeRunResult rk4_deterministic(double x_init, double xi_init, double big_b,
                               const brownian::TimeGrid& grid);
SdeRunResult rk4_deterministic(const oscillator::OscillatorParams& p,
                               const brownian::TimeGrid& grid);

// RK4 for the Lame equation u'' + (h - 12 q^2 sn^2(tau, q)) u = 0 in scaled
// time, from (u, u')(0) = (u_init, v_init) over [0, tau_end].
struct LameRunResult {
  std::vector<double> tau;
  std::vector<double> u;
  std::vector<double> v;
};

LameRunResult rk4_lame(const elliptic::Modulus& m, double u_init, double v_init, double tau_end,
                       int n_steps);

}  // namespace cubosc::sde
