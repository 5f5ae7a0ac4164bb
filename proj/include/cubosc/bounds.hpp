#pragma once

#include <cstdint>
#include <vector>

#include "cubosc/brownian.hpp"
#include "cubosc/expansion.hpp"
#include "cubosc/oscillator.hpp"

namespace cubosc::bounds {

// Deterministic envelopes for the expansion coefficients:
//   gamma_1(t) = |w1(t)| + |w2(t)|,
//   gamma_n(t) = int_0^t |K(t,s)| sum_{j=1}^{n-1} gamma_j(s) gamma_{n-j}(s) ds,
// and their partial sums Gamma_n = gamma_1 + ... + gamma_n.  The kernel
// absolute value is integrated directly (no |K| <= gamma_1 gamma_1
// factorization), so each order costs O(n_steps^2).
struct BoundTables {
  brownian::TimeGrid grid;
  std::vector<std::vector<double>> gamma;      // gamma[n-1][k]
  std::vector<std::vector<double>> big_gamma;  // prefix sums over orders
  double doob_constant = 0.0;  // sqrt(2/pi) (||w1||_L2 + ||w2||_L2) on [0, t_end]

  int order() const { return static_cast<int>(gamma.size()); }
};

BoundTables gamma_recursion(const expansion::KernelTable& table, int max_order);
BoundTables gamma_recursion(const oscillator::FundamentalPair& pair,
                            const brownian::TimeGrid& grid, int max_order);

// Probability lower bounds.  Both can be negative for moderate sigma (the
// norms grow with T through the linear-growth solution); vacuous bounds are
// returned as-is and flagged, never clamped.
struct ProbabilityBound {
  double value = 0.0;
  bool vacuous = false;
  double doob_constant = 0.0;
};

// P(coefficient envelopes hold up to order n on [0,T])
//   >= 1 - sigma 2^{(n-2)+} sqrt(2/pi) (||w1||_L2 + ||w2||_L2).
ProbabilityBound doob_probability_bound(const oscillator::FundamentalPair& pair, double t_end,
                                        double sigma, int n, int n_quad_steps = 1 << 16);

// P(sup_t |X_n^sigma - x0| <= Gamma_n) >= 1 - sigma 2^{(n-1)+} C, same C.
ProbabilityBound truncation_probability_bound(const oscillator::FundamentalPair& pair,
                                              double t_end, double sigma, int n,
                                              int n_quad_steps = 1 << 16);

// Monte-Carlo validation of the bounds: streams coefficient ensembles and
// counts the exceedance events the analytic bounds control.
struct EmpiricalResult {
  int n_paths = 0;
  double coefficient_fraction = 0.0;  // |x_n| <= gamma_n / sigma^n everywhere
  double truncation_fraction = 0.0;   // |X_n - x0| <= Gamma_n everywhere
  int implication_violations = 0;     // all-order envelopes held, sum bound broke
  // Per path: max_t sigma^n |x_n| / gamma_n over points with gamma_n > 0.
  std::vector<double> coefficient_ratios;

  double ratio_quantile(double p) const;  // empirical quantile of the ratios
};

class EmpiricalAccumulator {
 public:
  // Validates order n against tables computed to at least order n.
  EmpiricalAccumulator(const BoundTables& tables, double sigma, int n);

  void add(const expansion::CoefficientPaths& coeffs);

  // min_paths guards statistical meaning; fewer accumulated paths is an error.
  EmpiricalResult finalize(int min_paths = 1000) const;

 private:
  const BoundTables* tables_;
  double sigma_;
  int n_;
  int n_paths_ = 0;
  int coeff_ok_ = 0;
  int trunc_ok_ = 0;
  int implication_bad_ = 0;
  std::vector<double> ratios_;
};

// Self-driving ensemble run: samples n_paths Brownian paths from the seed,
// builds coefficients through order n and accumulates the event counts.
EmpiricalResult empirical_probability(const expansion::KernelTable& table,
                                      const BoundTables& tables, double sigma, int n,
                                      int n_paths, std::uint64_t seed,
                                      NoiseMode mode = NoiseMode::additive);

}  // namespace cubosc::bounds
