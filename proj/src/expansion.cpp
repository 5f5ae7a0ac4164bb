#include "cubosc/expansion.hpp"

#include <stdexcept>

namespace cubosc::expansion {

namespace {

void check_grid(const KernelTable& table, const brownian::TimeGrid& grid) {
  if (grid.n_steps != table.grid.n_steps || grid.dt != table.grid.dt)
    throw std::invalid_argument("expansion: path grid does not match the kernel table grid");
}

void check_samples(const KernelTable& table, const std::vector<double>& samples,
                   const char* what) {
  if (samples.size() != table.grid.size())
    throw std::invalid_argument(std::string("expansion: ") + what +
                                " sample count does not match the grid");
}

void check_lower_orders(const KernelTable& table, const std::vector<std::vector<double>>& coeffs,
                        int n) {
  if (n < 2) throw std::invalid_argument("expansion: recursion applies to orders n >= 2");
  if (static_cast<int>(coeffs.size()) < n)
    throw std::invalid_argument("expansion: coefficients 0..n-1 required before order n");
  for (int j = 0; j < n; ++j) check_samples(table, coeffs[static_cast<std::size_t>(j)], "coefficient");
}

// Convolution source S_n = sum_{j=1}^{n-1} x_j x_{n-j} at one grid point.
double quadratic_source(const std::vector<std::vector<double>>& coeffs, int n, std::size_t k) {
  double s = 0.0;
  for (int j = 1; j <= n - 1; ++j)
    s += coeffs[static_cast<std::size_t>(j)][k] * coeffs[static_cast<std::size_t>(n - j)][k];
  return s;
}

}  // namespace

KernelTable KernelTable::build(const oscillator::FundamentalPair& pair,
                               const brownian::TimeGrid& grid) {
  if (!(grid.dt > 0.0) || grid.n_steps < 1)
    throw std::domain_error("expansion: grid must have dt > 0 and at least one step");
  KernelTable t;
  t.grid = grid;
  const std::size_t m = grid.size();
  t.w1.resize(m);
  t.w2.resize(m);
  t.w1_dot.resize(m);
  t.w2_dot.resize(m);
  t.x0.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const auto v = pair.eval(grid.t(static_cast<int>(k)));
    t.w1[k] = v.w1;
    t.w2[k] = v.w2;
    t.w1_dot[k] = v.w1_dot;
    t.w2_dot[k] = v.w2_dot;
    t.x0[k] = v.x0;
  }
  return t;
}

std::vector<double> x1_path(const KernelTable& table, const brownian::BrownianPath& path) {
  check_grid(table, path.grid);
  const std::size_t m = table.grid.size();
  std::vector<double> out(m);
  out[0] = 0.0;
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t k = 1; k < m; ++k) {
    const double db = path.b[k] - path.b[k - 1];
    s1 += table.w1[k - 1] * db;
    s2 += table.w2[k - 1] * db;
    out[k] = table.w2[k] * s1 - table.w1[k] * s2;
  }
  return out;
}

std::vector<double> x1_path_by_parts(const KernelTable& table,
                                     const brownian::BrownianPath& path) {
  check_grid(table, path.grid);
  const std::size_t m = table.grid.size();
  const double dt = table.grid.dt;
  std::vector<double> out(m);
  out[0] = 0.0;
  double c1 = 0.0, c2 = 0.0;
  for (std::size_t k = 1; k < m; ++k) {
    c1 += 0.5 * dt * (table.w1_dot[k - 1] * path.b[k - 1] + table.w1_dot[k] * path.b[k]);
    c2 += 0.5 * dt * (table.w2_dot[k - 1] * path.b[k - 1] + table.w2_dot[k] * path.b[k]);
    out[k] = -table.w2[k] * c1 + table.w1[k] * c2;
  }
  return out;
}

std::vector<double> x1_variance(const KernelTable& table) {
  const std::size_t m = table.grid.size();
  const double dt = table.grid.dt;
  std::vector<double> out(m);
  out[0] = 0.0;
  double v11 = 0.0, v12 = 0.0, v22 = 0.0;
  for (std::size_t k = 1; k < m; ++k) {
    const double w1p = table.w1[k - 1];
    const double w2p = table.w2[k - 1];
    v11 += w1p * w1p * dt;
    v12 += w1p * w2p * dt;
    v22 += w2p * w2p * dt;
    const double w1k = table.w1[k];
    const double w2k = table.w2[k];
    out[k] = w2k * w2k * v11 - 2.0 * w1k * w2k * v12 + w1k * w1k * v22;
  }
  return out;
}

std::vector<double> xn_path(const KernelTable& table,
                            const std::vector<std::vector<double>>& coeffs, int n) {
  check_lower_orders(table, coeffs, n);
  const std::size_t m = table.grid.size();
  const double dt = table.grid.dt;
  std::vector<double> out(m);
  out[0] = 0.0;
  double c1 = 0.0, c2 = 0.0;
  double f1_prev = 0.0, f2_prev = 0.0;  // S_n(0) has x_j(0) = 0 factors
  {
    const double s0 = quadratic_source(coeffs, n, 0);
    f1_prev = table.w1[0] * s0;
    f2_prev = table.w2[0] * s0;
  }
  for (std::size_t k = 1; k < m; ++k) {
    const double s = quadratic_source(coeffs, n, k);
    const double f1 = table.w1[k] * s;
    const double f2 = table.w2[k] * s;
    c1 += 0.5 * dt * (f1_prev + f1);
    c2 += 0.5 * dt * (f2_prev + f2);
    f1_prev = f1;
    f2_prev = f2;
    out[k] = table.w2[k] * c1 - table.w1[k] * c2;
  }
  return out;
}

std::vector<double> multiplicative_x1_path(const KernelTable& table,
                                           const brownian::BrownianPath& path,
                                           const std::vector<double>& x0_samples) {
  check_grid(table, path.grid);
  check_samples(table, x0_samples, "x0");
  const std::size_t m = table.grid.size();
  std::vector<double> out(m);
  out[0] = 0.0;
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t k = 1; k < m; ++k) {
    const double weighted = x0_samples[k - 1] * (path.b[k] - path.b[k - 1]);
    s1 += table.w1[k - 1] * weighted;
    s2 += table.w2[k - 1] * weighted;
    out[k] = table.w2[k] * s1 - table.w1[k] * s2;
  }
  return out;
}

std::vector<double> multiplicative_xn_path(const KernelTable& table,
                                           const std::vector<std::vector<double>>& coeffs,
                                           const brownian::BrownianPath& path, int n) {
  check_grid(table, path.grid);
  std::vector<double> out = xn_path(table, coeffs, n);
  const std::vector<double>& prev = coeffs[static_cast<std::size_t>(n - 1)];
  const std::size_t m = table.grid.size();
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t k = 1; k < m; ++k) {
    const double weighted = prev[k - 1] * (path.b[k] - path.b[k - 1]);
    s1 += table.w1[k - 1] * weighted;
    s2 += table.w2[k - 1] * weighted;
    out[k] += table.w2[k] * s1 - table.w1[k] * s2;
  }
  return out;
}

CoefficientPaths build_coefficients(const KernelTable& table, const brownian::BrownianPath& path,
                                    int order, NoiseMode mode) {
  if (order < 1) throw std::domain_error("expansion: order must be at least 1");
  CoefficientPaths out;
  out.grid = table.grid;
  out.noise_mode = mode;
  out.paths.reserve(static_cast<std::size_t>(order) + 1);
  out.paths.push_back(table.x0);
  out.paths.push_back(mode == NoiseMode::additive
                          ? x1_path(table, path)
                          : multiplicative_x1_path(table, path, table.x0));
  for (int n = 2; n <= order; ++n)
    out.paths.push_back(mode == NoiseMode::additive
                            ? xn_path(table, out.paths, n)
                            : multiplicative_xn_path(table, out.paths, path, n));
  return out;
}

CoefficientPaths build_from_driver(const KernelTable& table, const std::vector<double>& z_samples,
                                   int order) {
  if (order < 1) throw std::domain_error("expansion: order must be at least 1");
  check_samples(table, z_samples, "driver");
  const std::size_t m = table.grid.size();
  const double dt = table.grid.dt;

  CoefficientPaths out;
  out.grid = table.grid;
  out.noise_mode = NoiseMode::additive;
  out.paths.reserve(static_cast<std::size_t>(order) + 1);
  out.paths.push_back(table.x0);

  // First coefficient: int K(t,s) dZ(s) through the integration-by-parts
  // Riemann form, the pathwise meaning for a continuous driver.
  std::vector<double> first(m);
  first[0] = 0.0;
  double c1 = 0.0, c2 = 0.0;
  for (std::size_t k = 1; k < m; ++k) {
    c1 += 0.5 * dt * (table.w1_dot[k - 1] * z_samples[k - 1] + table.w1_dot[k] * z_samples[k]);
    c2 += 0.5 * dt * (table.w2_dot[k - 1] * z_samples[k - 1] + table.w2_dot[k] * z_samples[k]);
    first[k] = -table.w2[k] * c1 + table.w1[k] * c2;
  }
  out.paths.push_back(std::move(first));

  for (int n = 2; n <= order; ++n) out.paths.push_back(xn_path(table, out.paths, n));
  return out;
}

std::vector<double> truncated_sum(const CoefficientPaths& coeffs, double sigma, int n) {
  if (n < 0 || n > coeffs.order())
    throw std::domain_error("expansion: truncation order outside the computed range");
  const std::size_t m = coeffs.paths[0].size();
  std::vector<double> out(m);
  for (std::size_t k = 0; k < m; ++k) {
    double acc = coeffs.paths[static_cast<std::size_t>(n)][k];
    for (int j = n - 1; j >= 0; --j)
      acc = coeffs.paths[static_cast<std::size_t>(j)][k] + sigma * acc;
    out[k] = acc;
  }
  return out;
}

}  // namespace cubosc::expansion
