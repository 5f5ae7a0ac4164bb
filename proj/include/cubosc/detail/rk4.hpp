#pragma once

namespace cubosc::detail {

// One classical RK4 step for the linear system u'' = g(t) u, written as
// (u, v)' = (v, g u).  The coefficient is passed pre-sampled at the step start,
// midpoint and end so callers can cache expensive evaluations.
inline void rk4_linear_step(double g0, double gm, double g1, double h, double& u, double& v) {
  const double k1u = v;
  const double k1v = g0 * u;
  const double k2u = v + 0.5 * h * k1v;
  const double k2v = gm * (u + 0.5 * h * k1u);
  const double k3u = v + 0.5 * h * k2v;
  const double k3v = gm * (u + 0.5 * h * k2u);
  const double k4u = v + h * k3v;
  const double k4v = g1 * (u + h * k3u);
  u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
  v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
}

}  // namespace cubosc::detail
