#pragma once

#include <functional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "cubosc/brownian.hpp"
#include "cubosc/expansion.hpp"
#include "cubosc/oscillator.hpp"

namespace cubosc::convergence {

// Shifted Catalan sequence: c_1 = c_2 = 1, c_n = sum_{j=1}^{n-1} c_j c_{n-j}.
// Exact integers; values overflow doubles near n = 520, so the table is
// arbitrary precision and a lossy double accessor is provided separately.
mpz_class catalan(int n);
double catalan_double(int n);

// Bounded continuous driver Z with an a.s. sup-norm majorant.  The majorant
// must be supplied, not estimated: a sample-based estimate is not an almost
// sure bound.  sup_norm(t) bounds |Z(s)| for all s <= t and is nondecreasing.
struct BoundedDriver {
  std::string name;
  std::function<double(double brownian_value, double t)> evaluate;
  std::function<double(double t)> sup_norm;
};

BoundedDriver example_driver();  // Z(t) = sin(B(t)) e^t, sup-norm e^t
BoundedDriver zero_driver();

// Z sampled on the path's grid: z[k] = evaluate(B(t_k), t_k).
std::vector<double> driver_samples(const BoundedDriver& driver,
                                   const brownian::BrownianPath& path);

// The two norm functionals of the convergence horizon.  As written, the
// position functional uses sup|w| factors and the driver functional uses
// sup|w'| factors; the conservative variant replaces every sup factor by
// max(sup|w|, sup|w'|), which dominates both readings.
enum class NormVariant { as_written, conservative };

struct NormOptions {
  NormVariant variant = NormVariant::as_written;
  int samples_per_period = 1 << 17;
};

// N(T) = sup|w2| ||w1||_L1 + sup|w1| ||w2||_L1 over [0, T].
double n_functional(const oscillator::FundamentalPair& pair, double t_end,
                    const NormOptions& options = {});

// M(T) = sup_{s<=T} ||Z(s)||_inf (sup|w2'| ||w1||_L1 + sup|w1'| ||w2||_L1).
double m_functional(const oscillator::FundamentalPair& pair, const BoundedDriver& driver,
                    double t_end, const NormOptions& options = {});

// Convergence horizon: the unique T with 4 sigma M(T) N(T) = 1.  Bracket by
// doubling (diverged error past T = 1e6), assert a single sign change on a
// log-spaced scan, then bisect until |4 sigma M N - 1| <= 1e-10.
double solve_t_sigma(const oscillator::FundamentalPair& pair, const BoundedDriver& driver,
                     double sigma, const NormOptions& options = {});

// Uniform tail bound (1 - sqrt(1 - 4 sigma M N)) / (2 N) for the series sum
// past order zero; requires 4 sigma M N <= 1 (inside the horizon).
double tail_bound(const oscillator::FundamentalPair& pair, const BoundedDriver& driver,
                  double sigma, double t_end, const NormOptions& options = {});

// Checks |chi_n(t)| <= c_n M(T)^n N(T)^{n-1} for orders 1..max_order on every
// grid point of one driver-built coefficient set.  envelope_scale shrinks the
// envelope (negative controls); 1 is the analytic envelope.
struct EnvelopeCheck {
  bool ok = true;
  double worst_ratio = 0.0;  // max over orders and times of |chi_n| / envelope
  int worst_order = 0;
  double worst_time = 0.0;
};

EnvelopeCheck coefficient_envelope_check(const expansion::CoefficientPaths& coeffs,
                                         const oscillator::FundamentalPair& pair,
                                         const BoundedDriver& driver, double t_end, int max_order,
                                         const NormOptions& options = {},
                                         double envelope_scale = 1.0);

}  // namespace cubosc::convergence
