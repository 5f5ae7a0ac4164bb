#include "cubosc/sde.hpp"

#include <cmath>
#include <stdexcept>

#include "cubosc/detail/rk4.hpp"

namespace cubosc::sde {

SdeRunResult euler_maruyama_from(double x_init, double xi_init, double big_b, double sigma,
                                 const brownian::BrownianPath& path, NoiseMode mode,
                                 double explosion_threshold) {
  if (!(explosion_threshold > 0.0))
    throw std::domain_error("euler_maruyama: explosion threshold must be positive");
  const brownian::TimeGrid& grid = path.grid;
  if (path.b.size() != grid.size())
    throw std::invalid_argument("euler_maruyama: path length does not match its grid");

  SdeRunResult r;
  r.grid = grid;
  r.x.reserve(grid.size());
  r.xi.reserve(grid.size());
  double x = x_init;
  double xi = xi_init;
  r.x.push_back(x);
  r.xi.push_back(xi);
  const double half = 0.5 * grid.dt;
  for (int k = 0; k < grid.n_steps; ++k) {
    const std::size_t j = static_cast<std::size_t>(k);
    const double db = path.b[j + 1] - path.b[j];
    // Diffusion frozen at the left endpoint (Ito convention), split evenly
    // across the two force kicks; sigma = 0 reduces to velocity Verlet, so
    // the deterministic error is O(dt^2) while the noise stays first order.
    const double noise = mode == NoiseMode::additive ? sigma * db : sigma * x * db;
    const double xi_half = xi + (x * x - big_b) * half + 0.5 * noise;
    const double x_new = x + xi_half * grid.dt;
    const double xi_new = xi_half + (x_new * x_new - big_b) * half + 0.5 * noise;
    x = x_new;
    xi = xi_new;
    r.x.push_back(x);
    r.xi.push_back(xi);
    if (std::abs(x) > explosion_threshold || !std::isfinite(x) || !std::isfinite(xi)) {
      r.exploded = true;
      r.blowup_index = k + 1;
      break;
    }
  }
  return r;
}

SdeRunResult euler_maruyama(const oscillator::OscillatorParams& p, double sigma,
                            const brownian::BrownianPath& path, NoiseMode mode,
                            double explosion_threshold) {
  return euler_maruyama_from(p.y, oscillator::initial_velocity(p), p.big_b, sigma, path, mode,
                             explosion_threshold);
}

SdeRunResult rk4_deterministic(double x_init, double xi_init, double big_b,
                               const brownian::TimeGrid& grid) {
  if (!(grid.dt > 0.0) || grid.n_steps < 1)
    throw std::domain_error("rk4_deterministic: grid must have dt > 0 and at least one step");
  SdeRunResult r;
  r.grid = grid;
  r.x.resize(grid.size());
  r.xi.resize(grid.size());
  double x = x_init;
  double xi = xi_init;
  r.x[0] = x;
  r.xi[0] = xi;
  const double h = grid.dt;
  for (int k = 0; k < grid.n_steps; ++k) {
    const double k1x = xi;
    const double k1v = x * x - big_b;
    const double x2 = x + 0.5 * h * k1x;
    const double k2x = xi + 0.5 * h * k1v;
    const double k2v = x2 * x2 - big_b;
    const double x3 = x + 0.5 * h * k2x;
    const double k3x = xi + 0.5 * h * k2v;
    const double k3v = x3 * x3 - big_b;
    const double x4 = x + h * k3x;
    const double k4x = xi + h * k3v;
    const double k4v = x4 * x4 - big_b;
    x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    xi += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    r.x[static_cast<std::size_t>(k) + 1] = x;
    r.xi[static_cast<std::size_t>(k) + 1] = xi;
  }
  return r;
}

SdeRunResult rk4_deterministic(const oscillator::OscillatorParams& p,
                               const brownian::TimeGrid& grid) {
  return rk4_deterministic(p.y, oscillator::initial_velocity(p), p.big_b, grid);
}

LameRunResult rk4_lame(const elliptic::Modulus& m, double u_init, double v_init, double tau_end,
                       int n_steps) {
  if (n_steps < 1) throw std::domain_error("rk4_lame: n_steps must be positive");
  const double big_k = elliptic::complete_K(m);
  const double q2 = m.q * m.q;
  const double h_eig = 4.0 + 4.0 * q2;
  const auto g = [&](double tau) {
    const auto j = elliptic::jacobi_sn_cn_dn(tau, m, big_k);
    return 12.0 * q2 * j.sn * j.sn - h_eig;
  };

  LameRunResult r;
  r.tau.resize(static_cast<std::size_t>(n_steps) + 1);
  r.u.resize(r.tau.size());
  r.v.resize(r.tau.size());
  const double h = tau_end / n_steps;
  double u = u_init;
  double v = v_init;
  r.tau[0] = 0.0;
  r.u[0] = u;
  r.v[0] = v;
  double g_left = g(0.0);
  for (int k = 0; k < n_steps; ++k) {
    const double t0 = h * static_cast<double>(k);
    const double gm = g(t0 + 0.5 * h);
    const double g1 = g(t0 + h);
    detail::rk4_linear_step(g_left, gm, g1, h, u, v);
    g_left = g1;
    const std::size_t j = static_cast<std::size_t>(k) + 1;
    r.tau[j] = t0 + h;
    r.u[j] = u;
    r.v[j] = v;
  }
  return r;
}

}  // namespace cubosc::sde
