#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "cubosc/expansion.hpp"
#include "cubosc/oscillator.hpp"
#include "support/quadrature.hpp"

namespace osc = cubosc::oscillator;
namespace ex = cubosc::expansion;
using cubosc::NoiseMode;
using cubosc::brownian::BrownianPath;
using cubosc::brownian::path_seed;
using cubosc::brownian::sample_brownian;
using cubosc::brownian::TimeGrid;

namespace {

const osc::OscillatorParams kRef = osc::OscillatorParams::make(1.0, -1.0, 0.0);
const osc::FundamentalPair kPair(kRef);

std::vector<double> cumtrapz(const std::vector<double>& f, double dt) {
  std::vector<double> out(f.size());
  out[0] = 0.0;
  for (std::size_t k = 1; k < f.size(); ++k) out[k] = out[k - 1] + 0.5 * dt * (f[k - 1] + f[k]);
  return out;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s = std::max(s, std::fabs(a[k] - b[k]));
  return s;
}

// Residual of the integrated first-order identity
// x1(t) = 2 int int x0 x1 + int B over fixed seeds; also the second-order one
// x2(t) = int int (2 x0 x2 + x1^2), and the gap between the two x1 estimators.
struct ResidualScan {
  double x1_ident = 0.0;
  double x2_ident = 0.0;
  double estimator_gap = 0.0;
};

ResidualScan residual_scan(double dt) {
  const auto grid = TimeGrid::from_duration(kRef.period, dt);
  const auto table = ex::KernelTable::build(kPair, grid);
  ResidualScan r;
  for (int i = 0; i < 8; ++i) {
    const auto path = sample_brownian(grid, 1000 + static_cast<std::uint64_t>(i));
    const auto coeffs = ex::build_coefficients(table, path, 2);
    const auto& x1 = coeffs.paths[1];
    const auto& x2 = coeffs.paths[2];

    std::vector<double> prod(x1.size()), src(x1.size());
    for (std::size_t k = 0; k < x1.size(); ++k) {
      prod[k] = table.x0[k] * x1[k];
      src[k] = 2.0 * table.x0[k] * x2[k] + x1[k] * x1[k];
    }
    const auto outer1 = cumtrapz(cumtrapz(prod, dt), dt);
    const auto ib = cumtrapz(path.b, dt);
    const auto outer2 = cumtrapz(cumtrapz(src, dt), dt);
    const auto x1_ibp = ex::x1_path_by_parts(table, path);
    for (std::size_t k = 0; k < x1.size(); ++k) {
      r.x1_ident = std::max(r.x1_ident, std::fabs(x1[k] - 2.0 * outer1[k] - ib[k]));
      r.x2_ident = std::max(r.x2_ident, std::fabs(x2[k] - outer2[k]));
      r.estimator_gap = std::max(r.estimator_gap, std::fabs(x1[k] - x1_ibp[k]));
    }
  }
  return r;
}

}  // namespace

TEST_CASE("kernel table samples the fundamental pair on the grid") {
  const auto grid = TimeGrid::from_duration(1.0, 1e-2);
  const auto table = ex::KernelTable::build(kPair, grid);
  REQUIRE(table.w1.size() == grid.size());
  for (const int k : {0, 37, 100}) {
    const auto v = kPair.eval(grid.t(k));
    CHECK(table.w1[static_cast<std::size_t>(k)] == v.w1);
    CHECK(table.w2[static_cast<std::size_t>(k)] == v.w2);
    CHECK(table.w1_dot[static_cast<std::size_t>(k)] == v.w1_dot);
    CHECK(table.w2_dot[static_cast<std::size_t>(k)] == v.w2_dot);
    CHECK(table.x0[static_cast<std::size_t>(k)] == v.x0);
  }
  CHECK_THROWS_AS(ex::KernelTable::build(kPair, TimeGrid{0.0, 5}), std::domain_error);
}

TEST_CASE("zero noise produces zero coefficients at every order") {
  const auto grid = TimeGrid::from_duration(2.0, 1e-3);
  const auto table = ex::KernelTable::build(kPair, grid);
  const BrownianPath flat{grid, std::vector<double>(grid.size(), 0.0)};
  for (const auto mode : {NoiseMode::additive, NoiseMode::multiplicative}) {
    const auto coeffs = ex::build_coefficients(table, flat, 4, mode);
    REQUIRE(coeffs.order() == 4);
    CHECK(coeffs.paths[0] == table.x0);
    for (int n = 1; n <= 4; ++n)
      for (const double v : coeffs.paths[static_cast<std::size_t>(n)]) CHECK(v == 0.0);
    CHECK(ex::truncated_sum(coeffs, 0.3, 4) == table.x0);
  }
}

TEST_CASE("coefficient paths start at zero and ride on the closed-form orbit") {
  const auto grid = TimeGrid::from_duration(kRef.period, 1e-3);
  const auto table = ex::KernelTable::build(kPair, grid);
  const auto path = sample_brownian(grid, 31);
  const auto coeffs = ex::build_coefficients(table, path, 3);
  for (int n = 1; n <= 3; ++n) CHECK(coeffs.paths[static_cast<std::size_t>(n)][0] == 0.0);
  for (const int k : {0, 500, 4000}) {
    CHECK(coeffs.paths[0][static_cast<std::size_t>(k)] ==
          doctest::Approx(osc::x0(kRef, grid.t(k))).epsilon(1e-14));
  }
}

TEST_CASE("first coefficient is linear in the driving path") {
  const auto grid = TimeGrid::from_duration(3.0, 1e-3);
  const auto table = ex::KernelTable::build(kPair, grid);
  const auto pa = sample_brownian(grid, 11);
  const auto pb = sample_brownian(grid, 12);
  BrownianPath mix{grid, std::vector<double>(grid.size())};
  const double al = 0.7, be = -1.3;
  for (std::size_t k = 0; k < mix.b.size(); ++k) mix.b[k] = al * pa.b[k] + be * pb.b[k];
  const auto xa = ex::x1_path(table, pa);
  const auto xb = ex::x1_path(table, pb);
  const auto xm = ex::x1_path(table, mix);
  double worst = 0.0;
  for (std::size_t k = 0; k < xm.size(); ++k)
    worst = std::max(worst, std::fabs(xm[k] - al * xa[k] - be * xb[k]));
  CHECK(worst <= 1e-12);
}

TEST_CASE("coefficients are adapted: shared past gives shared prefix") {
  const auto grid = TimeGrid::from_duration(2.0, 1e-3);
  const auto table = ex::KernelTable::build(kPair, grid);
  const auto p1 = sample_brownian(grid, 21);
  auto p2 = sample_brownian(grid, 22);
  const std::size_t split = 1200;
  for (std::size_t k = 0; k <= split; ++k) p2.b[k] = p1.b[k];
  const auto c1 = ex::build_coefficients(table, p1, 3);
  const auto c2 = ex::build_coefficients(table, p2, 3);
  for (int n = 1; n <= 3; ++n) {
    for (std::size_t k = 0; k <= split; ++k)
      CHECK(c1.paths[static_cast<std::size_t>(n)][k] == c2.paths[static_cast<std::size_t>(n)][k]);
    // Divergent futures show up somewhere past the split (for n >= 2 only a
    // few cells later: the new sample enters through the vanishing diagonal).
    double tail_gap = 0.0;
    for (std::size_t k = split + 1; k < c1.paths[0].size(); ++k)
      tail_gap = std::max(tail_gap, std::fabs(c1.paths[static_cast<std::size_t>(n)][k] -
                                              c2.paths[static_cast<std::size_t>(n)][k]));
    CHECK(tail_gap > 0.0);
  }
}

TEST_CASE("integrated identities hold with O(dt) and O(dt^2) residuals") {
  const auto coarse = residual_scan(2e-3);
  const auto mid = residual_scan(1e-3);
  const auto fine = residual_scan(5e-4);
  CHECK(mid.x1_ident <= 6e-3);
  CHECK(fine.x1_ident <= 3e-3);
  CHECK(coarse.x1_ident / fine.x1_ident >= 2.0);
  CHECK(mid.x2_ident <= 2e-5);
  CHECK(coarse.x2_ident / fine.x2_ident >= 4.0);
  // Ito-sum and by-parts estimators converge to each other at first order.
  CHECK(mid.estimator_gap <= 6e-3);
  CHECK(coarse.estimator_gap / fine.estimator_gap >= 2.0);
  CHECK(coarse.estimator_gap / fine.estimator_gap <= 6.0);
}

TEST_CASE("monte carlo moments match the isometry variance") {
  const auto grid = TimeGrid::from_duration(kRef.period, 2e-3);
  const auto table = ex::KernelTable::build(kPair, grid);
  const auto var_table = ex::x1_variance(table);
  const int n_paths = 10000;
  const std::vector<int> idx = {grid.n_steps / 5, 2 * grid.n_steps / 5, 3 * grid.n_steps / 5,
                                4 * grid.n_steps / 5, grid.n_steps};
  std::vector<std::vector<double>> samples(idx.size());
  for (auto& s : samples) s.reserve(n_paths);
  for (int i = 0; i < n_paths; ++i) {
    const auto path = sample_brownian(grid, path_seed(777, static_cast<std::uint64_t>(i)));
    const auto x1 = ex::x1_path(table, path);
    for (std::size_t j = 0; j < idx.size(); ++j)
      samples[j].push_back(x1[static_cast<std::size_t>(idx[j])]);
  }
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const double t = grid.t(idx[j]);
    const auto kernel2 = [t](double s) {
      const auto vt = kPair.eval(t);
      const auto vs = kPair.eval(s);
      const double kv = vt.w2 * vs.w1 - vt.w1 * vs.w2;
      return kv * kv;
    };
    const double var_quad = oracle::adaptive_gk(kernel2, 0.0, t, 1e-12);
    const double var_mc = oracle::variance_of(samples[j]);
    const double se = oracle::variance_standard_error(samples[j]);
    // Discrete construction, its continuum limit and the sample all agree.
    CHECK(std::fabs(var_table[static_cast<std::size_t>(idx[j])] - var_quad) <=
          5e-3 * var_quad);
    CHECK(std::fabs(var_mc - var_table[static_cast<std::size_t>(idx[j])]) <= 3.0 * se);
    CHECK(std::fabs(var_mc - var_quad) <= 3.0 * se);
    CHECK(std::fabs(oracle::mean_of(samples[j])) <=
          4.0 * std::sqrt(var_quad / static_cast<double>(n_paths)));
    CHECK(std::fabs(oracle::skewness_of(samples[j])) <=
          3.0 * oracle::skewness_standard_error(samples[j]));
  }
}

TEST_CASE("second coefficient is stable under grid refinement") {
  const auto fine_grid = TimeGrid::from_duration(kRef.period, 2.5e-4);
  const auto fine_table = ex::KernelTable::build(kPair, fine_grid);
  const auto coarse_grid = TimeGrid{1e-3, fine_grid.n_steps / 4};
  const auto coarse_table = ex::KernelTable::build(kPair, coarse_grid);
  const auto mid_grid = TimeGrid{5e-4, fine_grid.n_steps / 2};
  const auto mid_table = ex::KernelTable::build(kPair, mid_grid);
  double gap_coarse = 0.0, gap_mid = 0.0;
  for (int i = 0; i < 6; ++i) {
    const auto fine = sample_brownian(fine_grid, path_seed(31337, static_cast<std::uint64_t>(i)));
    BrownianPath mid{mid_grid, {}}, coarse{coarse_grid, {}};
    for (int k = 0; k <= mid_grid.n_steps; ++k)
      mid.b.push_back(fine.b[static_cast<std::size_t>(k) * 2]);
    for (int k = 0; k <= coarse_grid.n_steps; ++k)
      coarse.b.push_back(fine.b[static_cast<std::size_t>(k) * 4]);
    const auto cf = ex::build_coefficients(fine_table, fine, 2);
    const auto cm = ex::build_coefficients(mid_table, mid, 2);
    const auto cc = ex::build_coefficients(coarse_table, coarse, 2);
    for (int k = 0; k <= coarse_grid.n_steps; ++k) {
      const auto kc = static_cast<std::size_t>(k);
      gap_coarse = std::max(gap_coarse,
                            std::fabs(cc.paths[2][kc] - cf.paths[2][kc * 4]));
      gap_mid = std::max(gap_mid, std::fabs(cm.paths[2][kc * 2] - cf.paths[2][kc * 4]));
    }
  }
  CHECK(gap_coarse < 0.05);
  CHECK(gap_mid < gap_coarse);
}

TEST_CASE("multiplicative construction: reductions to the additive one") {
  const auto grid = TimeGrid::from_duration(2.0, 1e-3);
  const auto table = ex::KernelTable::build(kPair, grid);
  const auto path = sample_brownian(grid, 91);

  // Unit state samples turn the state-scaled increments into plain ones.
  const std::vector<double> ones(grid.size(), 1.0);
  CHECK(ex::multiplicative_x1_path(table, path, ones) == ex::x1_path(table, path));

  // With a flat path the extra Ito term vanishes and the recursion coincides.
  const BrownianPath flat{grid, std::vector<double>(grid.size(), 0.0)};
  auto coeffs = ex::build_coefficients(table, path, 2);
  CHECK(ex::multiplicative_xn_path(table, coeffs.paths, flat, 2) ==
        ex::xn_path(table, coeffs.paths, 2));

  // Same path, different mode: genuinely different first coefficient.
  const auto mul = ex::build_coefficients(table, path, 2, NoiseMode::multiplicative);
  CHECK(mul.noise_mode == NoiseMode::multiplicative);
  CHECK(sup_diff(mul.paths[1], coeffs.paths[1]) > 1e-3);
}

TEST_CASE("truncated sums: horner evaluation and order differences") {
  const auto grid = TimeGrid::from_duration(kRef.period, 1e-3);
  const auto table = ex::KernelTable::build(kPair, grid);
  const auto path = sample_brownian(grid, 4);
  const auto coeffs = ex::build_coefficients(table, path, 3);
  const double sigma = 0.02;

  const auto x3 = ex::truncated_sum(coeffs, sigma, 3);
  const auto x2 = ex::truncated_sum(coeffs, sigma, 2);
  const auto x0only = ex::truncated_sum(coeffs, sigma, 0);
  CHECK(x0only == coeffs.paths[0]);
  CHECK(ex::truncated_sum(coeffs, 0.0, 3) == coeffs.paths[0]);

  const double s3 = sigma * sigma * sigma;
  double worst_order = 0.0, worst_direct = 0.0;
  for (std::size_t k = 0; k < x3.size(); ++k) {
    worst_order = std::max(worst_order, std::fabs(x3[k] - x2[k] - s3 * coeffs.paths[3][k]));
    double direct = 0.0;
    for (int n = 3; n >= 0; --n)
      direct = direct * sigma + coeffs.paths[static_cast<std::size_t>(n)][k];
    worst_direct = std::max(worst_direct, std::fabs(x3[k] - direct));
  }
  CHECK(worst_order <= 1e-14);
  CHECK(worst_direct <= 1e-12);
  CHECK_THROWS_AS(ex::truncated_sum(coeffs, sigma, 4), std::domain_error);
  CHECK_THROWS_AS(ex::truncated_sum(coeffs, sigma, -1), std::domain_error);
}

TEST_CASE("continuous drivers: by-parts coefficient and quadrature oracle") {
  const auto grid = TimeGrid::from_duration(2.0, 1e-3);
  const auto table = ex::KernelTable::build(kPair, grid);

  // Brownian samples fed as a driver reproduce the by-parts estimator.
  const auto path = sample_brownian(grid, 61);
  const auto via_driver = ex::build_from_driver(table, path.b, 2);
  CHECK(via_driver.paths[1] == ex::x1_path_by_parts(table, path));

  // Smooth driver: first coefficient equals int K(t,s) Z'(s) ds.
  std::vector<double> z(grid.size());
  for (std::size_t k = 0; k < z.size(); ++k) z[k] = std::sin(grid.t(static_cast<int>(k)));
  const auto smooth = ex::build_from_driver(table, z, 2);
  for (const double t : {0.7, 1.5, 2.0}) {
    const auto f = [t](double s) {
      const auto vt = kPair.eval(t);
      const auto vs = kPair.eval(s);
      return (vt.w2 * vs.w1 - vt.w1 * vs.w2) * std::cos(s);
    };
    const double want = oracle::adaptive_gk(f, 0.0, t, 1e-12);
    const std::size_t k = static_cast<std::size_t>(std::llround(t / grid.dt));
    CHECK(std::fabs(smooth.paths[1][k] - want) <= 1e-6);
  }

  const std::vector<double> zero(grid.size(), 0.0);
  const auto none = ex::build_from_driver(table, zero, 3);
  for (int n = 1; n <= 3; ++n)
    for (const double v : none.paths[static_cast<std::size_t>(n)]) CHECK(v == 0.0);
}

TEST_CASE("construction rejects inconsistent inputs") {
  const auto grid = TimeGrid::from_duration(1.0, 1e-3);
  const auto other = TimeGrid::from_duration(1.0, 2e-3);
  const auto table = ex::KernelTable::build(kPair, grid);
  const auto bad_path = sample_brownian(other, 1);
  CHECK_THROWS_AS(ex::x1_path(table, bad_path), std::invalid_argument);
  const auto path = sample_brownian(grid, 1);
  CHECK_THROWS_AS(ex::build_coefficients(table, path, 0), std::domain_error);
  auto coeffs = ex::build_coefficients(table, path, 2);
  CHECK_THROWS_AS(ex::xn_path(table, coeffs.paths, 1), std::invalid_argument);
  CHECK_THROWS_AS(ex::xn_path(table, coeffs.paths, 4), std::invalid_argument);
  CHECK_THROWS_AS(ex::build_from_driver(table, std::vector<double>(3, 0.0), 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(ex::multiplicative_x1_path(table, path, std::vector<double>(3, 0.0)),
                  std::invalid_argument);
}
