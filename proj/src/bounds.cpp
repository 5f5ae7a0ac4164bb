#include "cubosc/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cubosc::bounds {

namespace {

constexpr double kSqrt2OverPi = 0.79788456080286535588;  // sqrt(2/pi)

// sqrt(2/pi) (||w1||_L2 + ||w2||_L2) on [0, t_end], trapezoid with n slices.
double doob_constant_for(const oscillator::FundamentalPair& pair, double t_end, int n) {
  if (!(t_end > 0.0)) throw std::domain_error("bounds: t_end must be positive");
  if (n < 2) throw std::domain_error("bounds: quadrature needs at least two slices");
  const double h = t_end / n;
  double s1 = 0.0, s2 = 0.0;
  for (int k = 0; k <= n; ++k) {
    const auto v = pair.eval(h * static_cast<double>(k));
    const double weight = (k == 0 || k == n) ? 0.5 : 1.0;
    s1 += weight * v.w1 * v.w1;
    s2 += weight * v.w2 * v.w2;
  }
  return kSqrt2OverPi * (std::sqrt(s1 * h) + std::sqrt(s2 * h));
}

ProbabilityBound bound_from_exponent(const oscillator::FundamentalPair& pair, double t_end,
                                     double sigma, int shifted_n, int n_quad_steps) {
  if (!(sigma >= 0.0)) throw std::domain_error("bounds: sigma must be nonnegative");
  ProbabilityBound out;
  out.doob_constant = doob_constant_for(pair, t_end, n_quad_steps);
  const double factor = std::ldexp(1.0, std::max(shifted_n, 0));
  out.value = 1.0 - sigma * factor * out.doob_constant;
  out.vacuous = out.value < 0.0;
  return out;
}

}  // namespace

BoundTables gamma_recursion(const expansion::KernelTable& table, int max_order) {
  if (max_order < 1) throw std::domain_error("bounds: max_order must be at least 1");
  const std::size_t m = table.grid.size();
  const double dt = table.grid.dt;

  BoundTables out;
  out.grid = table.grid;
  out.gamma.reserve(static_cast<std::size_t>(max_order));

  std::vector<double> first(m);
  for (std::size_t k = 0; k < m; ++k) first[k] = std::abs(table.w1[k]) + std::abs(table.w2[k]);
  out.gamma.push_back(std::move(first));

  std::vector<double> source(m);
  for (int n = 2; n <= max_order; ++n) {
    for (std::size_t k = 0; k < m; ++k) {
      double s = 0.0;
      for (int j = 1; j <= n - 1; ++j)
        s += out.gamma[static_cast<std::size_t>(j - 1)][k] *
             out.gamma[static_cast<std::size_t>(n - j - 1)][k];
      source[k] = s;
    }
    std::vector<double> row(m);
    row[0] = 0.0;
    for (std::size_t k = 1; k < m; ++k) {
      const double w1k = table.w1[k];
      const double w2k = table.w2[k];
      double acc = 0.5 * std::abs(w2k * table.w1[0] - w1k * table.w2[0]) * source[0];
      for (std::size_t j = 1; j < k; ++j)
        acc += std::abs(w2k * table.w1[j] - w1k * table.w2[j]) * source[j];
      // j = k endpoint: the kernel vanishes on the diagonal.
      row[k] = acc * dt;
    }
    out.gamma.push_back(std::move(row));
  }

  out.big_gamma.resize(out.gamma.size());
  std::vector<double> running(m, 0.0);
  for (std::size_t n = 0; n < out.gamma.size(); ++n) {
    for (std::size_t k = 0; k < m; ++k) running[k] += out.gamma[n][k];
    out.big_gamma[n] = running;
  }

  double s1 = 0.0, s2 = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double weight = (k == 0 || k + 1 == m) ? 0.5 : 1.0;
    s1 += weight * table.w1[k] * table.w1[k];
    s2 += weight * table.w2[k] * table.w2[k];
  }
  out.doob_constant = kSqrt2OverPi * (std::sqrt(s1 * dt) + std::sqrt(s2 * dt));
  return out;
}

BoundTables gamma_recursion(const oscillator::FundamentalPair& pair,
                            const brownian::TimeGrid& grid, int max_order) {
  return gamma_recursion(expansion::KernelTable::build(pair, grid), max_order);
}

ProbabilityBound doob_probability_bound(const oscillator::FundamentalPair& pair, double t_end,
                                        double sigma, int n, int n_quad_steps) {
  if (n < 1) throw std::domain_error("bounds: order must be at least 1");
  return bound_from_exponent(pair, t_end, sigma, n - 2, n_quad_steps);
}

ProbabilityBound truncation_probability_bound(const oscillator::FundamentalPair& pair,
                                              double t_end, double sigma, int n,
                                              int n_quad_steps) {
  if (n < 1) throw std::domain_error("bounds: order must be at least 1");
  return bound_from_exponent(pair, t_end, sigma, n - 1, n_quad_steps);
}

double EmpiricalResult::ratio_quantile(double p) const {
  if (coefficient_ratios.empty())
    throw std::logic_error("bounds: no ratios accumulated");
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("bounds: quantile level outside [0,1]");
  std::vector<double> sorted = coefficient_ratios;
  std::sort(sorted.begin(), sorted.end());
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

EmpiricalAccumulator::EmpiricalAccumulator(const BoundTables& tables, double sigma, int n)
    : tables_(&tables), sigma_(sigma), n_(n) {
  if (n < 1) throw std::domain_error("bounds: order must be at least 1");
  if (tables.order() < n)
    throw std::invalid_argument("bounds: tables do not reach the requested order");
  if (!(sigma > 0.0)) throw std::domain_error("bounds: sigma must be positive");
}

void EmpiricalAccumulator::add(const expansion::CoefficientPaths& coeffs) {
  if (coeffs.order() < n_)
    throw std::invalid_argument("bounds: coefficient paths do not reach the requested order");
  const std::size_t m = tables_->grid.size();
  if (coeffs.paths[0].size() != m)
    throw std::invalid_argument("bounds: coefficient grid does not match the bound tables");

  std::vector<double> sigma_pow(static_cast<std::size_t>(n_) + 1);
  sigma_pow[0] = 1.0;
  for (int j = 1; j <= n_; ++j) sigma_pow[static_cast<std::size_t>(j)] = sigma_pow[j - 1] * sigma_;

  bool all_orders_ok = true;
  bool order_n_ok = true;
  bool truncation_ok = true;
  double worst_ratio = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    double weighted_sum = 0.0;
    for (int j = 1; j <= n_; ++j) {
      const double scaled =
          sigma_pow[static_cast<std::size_t>(j)] * coeffs.paths[static_cast<std::size_t>(j)][k];
      weighted_sum += scaled;
      const double envelope = tables_->gamma[static_cast<std::size_t>(j - 1)][k];
      const double magnitude = std::abs(scaled);
      // envelope == 0 only happens on the first panel, where the trapezoid
      // integrand vanishes at both endpoints; the continuum envelope is
      // strictly positive there and the coefficient is at roundoff scale, so
      // the point carries no event information and is skipped.
      if (envelope == 0.0) continue;
      if (magnitude > envelope) {
        all_orders_ok = false;
        if (j == n_) order_n_ok = false;
      }
      if (j == n_) worst_ratio = std::max(worst_ratio, magnitude / envelope);
    }
    if (std::abs(weighted_sum) > tables_->big_gamma[static_cast<std::size_t>(n_ - 1)][k])
      truncation_ok = false;
  }

  ++n_paths_;
  if (order_n_ok) ++coeff_ok_;
  if (truncation_ok) ++trunc_ok_;
  if (all_orders_ok && !truncation_ok) ++implication_bad_;
  ratios_.push_back(worst_ratio);
}

EmpiricalResult EmpiricalAccumulator::finalize(int min_paths) const {
  if (n_paths_ < min_paths)
    throw std::domain_error("bounds: ensemble too small for empirical validation");
  EmpiricalResult r;
  r.n_paths = n_paths_;
  r.coefficient_fraction = static_cast<double>(coeff_ok_) / n_paths_;
  r.truncation_fraction = static_cast<double>(trunc_ok_) / n_paths_;
  r.implication_violations = implication_bad_;
  r.coefficient_ratios = ratios_;
  return r;
}

EmpiricalResult empirical_probability(const expansion::KernelTable& table,
                                      const BoundTables& tables, double sigma, int n, int n_paths,
                                      std::uint64_t seed, NoiseMode mode) {
  EmpiricalAccumulator acc(tables, sigma, n);
  for (int i = 0; i < n_paths; ++i) {
    const auto path =
        brownian::sample_brownian(table.grid, brownian::path_seed(seed, static_cast<std::uint64_t>(i)));
    acc.add(expansion::build_coefficients(table, path, n, mode));
  }
  return acc.finalize();
}

}  // namespace cubosc::bounds
