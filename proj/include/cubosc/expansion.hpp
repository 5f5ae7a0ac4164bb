#pragma once

#include <vector>

#include "cubosc/brownian.hpp"
#include "cubosc/oscillator.hpp"

namespace cubosc::expansion {

// Fundamental pair, its derivatives and x0 sampled once on a grid.  All
// coefficient constructions below share these samples; every path on the same
// grid reuses one table.
struct KernelTable {
  brownian::TimeGrid grid;
  std::vector<double> w1, w2, w1_dot, w2_dot, x0;

  static KernelTable build(const oscillator::FundamentalPair& pair,
                           const brownian::TimeGrid& grid);
};

// Coefficient paths of the power-series ansatz x = x0 + sigma x1 + sigma^2 x2
// + ...; paths[0] holds x0 samples, paths[n] the n-th coefficient.
struct CoefficientPaths {
  brownian::TimeGrid grid;
  NoiseMode noise_mode = NoiseMode::additive;
  std::vector<std::vector<double>> paths;

  int order() const { return static_cast<int>(paths.size()) - 1; }
};

// First coefficient as left-point Ito sums of the kernel
// K(t,s) = w2(t)w1(s) - w1(t)w2(s) against the Brownian increments:
// x1(t_k) = w2(t_k) sum_{j<k} w1(s_j) dB_j - w1(t_k) sum_{j<k} w2(s_j) dB_j.
std::vector<double> x1_path(const KernelTable& table, const brownian::BrownianPath& path);

// Same integral after integration by parts (K vanishes on the diagonal):
// x1(t) = -w2(t) int w1' B ds + w1(t) int w2' B ds, trapezoid rule.
// Cross-validates the Ito-sum estimator; also the pathwise definition used
// for continuous drivers that are not semimartingale increments.
std::vector<double> x1_path_by_parts(const KernelTable& table,
                                     const brownian::BrownianPath& path);

// Variance of x1(t_k) for unit sigma under the discrete construction
// (Ito isometry applied to the left-point sums).
std::vector<double> x1_variance(const KernelTable& table);

// n-th coefficient (n >= 2) from the lower ones:
// xn(t) = int_0^t K(t,s) sum_{j=1}^{n-1} x_j(s) x_{n-j}(s) ds,
// evaluated as w2 cumtrapz(w1 S) - w1 cumtrapz(w2 S) in O(n_steps).
std::vector<double> xn_path(const KernelTable& table,
                            const std::vector<std::vector<double>>& coeffs, int n);

// Multiplicative-noise variants: the force term is sigma x dB, so the order-n
// equation gains x_{n-1} dB and the first coefficient integrates x0 dB.
std::vector<double> multiplicative_x1_path(const KernelTable& table,
                                           const brownian::BrownianPath& path,
                                           const std::vector<double>& x0_samples);
std::vector<double> multiplicative_xn_path(const KernelTable& table,
                                           const std::vector<std::vector<double>>& coeffs,
                                           const brownian::BrownianPath& path, int n);

// All coefficients through the given order for one Brownian realization.
CoefficientPaths build_coefficients(const KernelTable& table, const brownian::BrownianPath& path,
                                    int order, NoiseMode mode = NoiseMode::additive);

// Continuous-driver variant: increments of Z replace the Brownian increments.
// The first coefficient evaluates int K(t,s) dZ(s) through the
// integration-by-parts form; higher orders use the same quadratic recursion.
CoefficientPaths build_from_driver(const KernelTable& table, const std::vector<double>& z_samples,
                                   int order);

// Truncated expansion X_n^sigma(t) = sum_{k<=n} sigma^k paths[k](t), Horner.
std::vector<double> truncated_sum(const CoefficientPaths& coeffs, double sigma, int n);

}  // namespace cubosc::expansion
