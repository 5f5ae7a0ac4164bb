#include "cubosc/oscillator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cubosc/detail/rk4.hpp"

namespace cubosc::oscillator {

namespace {

// Polynomial coefficients of the second nu = 3 Lame pair:
// u2 = alpha0 + alpha1 cn^2 + alpha2 cn^4 + (beta0 tau + beta1 eps(tau)) u1.
struct LameCoefficients {
  double alpha0, alpha1, alpha2, beta0, beta1;

  explicit LameCoefficients(double q2) {
    const double q4 = q2 * q2;
    const double q6 = q4 * q2;
    alpha0 = q2 - 1.0;
    alpha1 = -2.0 * q6 + 3.0 * q4 - 5.0 * q2 + 2.0;
    alpha2 = 2.0 * q2 * (q4 - q2 + 1.0);
    beta0 = -q4 + 3.0 * q2 - 2.0;
    beta1 = 2.0 * (q4 - q2 + 1.0);
  }
};

struct LameEval {
  double sn2, u1, u1_dot, u2, u2_dot;
};

LameEval lame_eval(double tau, const elliptic::Modulus& m, double big_k, double big_e,
                   const LameCoefficients& co) {
  const auto j = elliptic::jacobi_sn_cn_dn(tau, m, big_k);
  const double eps = elliptic::jacobi_epsilon(tau, m, big_k, big_e);
  const double q2 = m.q * m.q;
  const double sn2 = j.sn * j.sn;
  const double cn2 = j.cn * j.cn;
  const double dn2 = j.dn * j.dn;

  LameEval out;
  out.sn2 = sn2;
  out.u1 = j.sn * j.cn * j.dn;
  out.u1_dot = dn2 * (cn2 - sn2) - q2 * sn2 * cn2;

  const double poly = co.alpha0 + cn2 * (co.alpha1 + co.alpha2 * cn2);
  const double poly_dot = -2.0 * out.u1 * (co.alpha1 + 2.0 * co.alpha2 * cn2);
  const double lin = co.beta0 * tau + co.beta1 * eps;
  const double lin_dot = co.beta0 + co.beta1 * dn2;
  out.u2 = poly + lin * out.u1;
  out.u2_dot = poly_dot + lin_dot * out.u1 + lin * out.u1_dot;
  return out;
}

}  // namespace

OscillatorParams OscillatorParams::make(double a, double c, double y, int eta_sign) {
  if (!(c < 0.0 && 0.0 < a)) throw std::domain_error("oscillator: roots must satisfy c < 0 < a");
  if (!(a + 2.0 * c < 0.0))
    throw std::domain_error("oscillator: need a + 2c < 0, otherwise the orbit degenerates");
  if (!(c + 2.0 * a > 0.0))
    throw std::domain_error("oscillator: need c + 2a > 0, orbit must lie inside the separatrix");
  const double b = -a - c;
  if (!(c <= y && y <= b))
    throw std::domain_error("oscillator: y must lie between the turning points c and -a-c");
  if (eta_sign != 1 && eta_sign != -1)
    throw std::domain_error("oscillator: eta_sign must be +1 or -1");

  OscillatorParams p;
  p.a = a;
  p.c = c;
  p.y = y;
  p.eta_sign = eta_sign;
  p.big_b = (a * a + c * c + a * c) / 3.0;
  p.q = elliptic::Modulus::from_q(std::sqrt((2.0 * c + a) / (c - a)));
  p.omega = std::sqrt((a - c) / 6.0);
  const double ratio = std::clamp((c - y) / (2.0 * c + a), 0.0, 1.0);
  p.i_y = elliptic::incomplete_F(std::asin(std::sqrt(ratio)), p.q);
  p.big_k = elliptic::complete_K(p.q);
  p.big_e = elliptic::complete_E(p.q);
  p.period = 2.0 * p.big_k / p.omega;
  return p;
}

double hamiltonian(double x, double xi, double big_b) {
  return 0.5 * xi * xi - x * x * x / 3.0 + big_b * x;
}

double orbit_energy(const OscillatorParams& p) { return p.a * p.c * (p.a + p.c) / 3.0; }

double initial_velocity(const OscillatorParams& p) {
  const double h0 = orbit_energy(p);
  const double v2 = 2.0 * (h0 + p.y * p.y * p.y / 3.0 - p.big_b * p.y);
  return p.eta_sign * std::sqrt(std::max(v2, 0.0));
}

double x0(const OscillatorParams& p, double t) {
  const double phi = p.omega * t + p.eta_sign * p.i_y;
  const auto j = elliptic::jacobi_sn_cn_dn(phi, p.q, p.big_k);
  return p.c - (p.a + 2.0 * p.c) * j.sn * j.sn;
}

double x0_dot(const OscillatorParams& p, double t) {
  const double phi = p.omega * t + p.eta_sign * p.i_y;
  const auto j = elliptic::jacobi_sn_cn_dn(phi, p.q, p.big_k);
  return -2.0 * p.omega * (p.a + 2.0 * p.c) * j.sn * j.cn * j.dn;
}

double lame_eigenvalue(const OscillatorParams& p) {
  const double h_roots = 12.0 * p.c / (p.c - p.a);
  const double h_modulus = 4.0 + 4.0 * p.q.q * p.q.q;
  if (std::abs(h_roots - h_modulus) > 1e-12 * std::max(1.0, std::abs(h_modulus)))
    throw std::logic_error("oscillator: inconsistent Lame eigenvalue");
  return h_modulus;
}

double u1(double tau, const elliptic::Modulus& m) {
  const auto j = elliptic::jacobi_sn_cn_dn(tau, m, elliptic::complete_K(m));
  return j.sn * j.cn * j.dn;
}

double u1_dot(double tau, const elliptic::Modulus& m) {
  const auto j = elliptic::jacobi_sn_cn_dn(tau, m, elliptic::complete_K(m));
  const double q2 = m.q * m.q;
  const double sn2 = j.sn * j.sn;
  const double cn2 = j.cn * j.cn;
  const double dn2 = j.dn * j.dn;
  return dn2 * (cn2 - sn2) - q2 * sn2 * cn2;
}

double u2(double tau, const elliptic::Modulus& m) {
  const LameCoefficients co(m.q * m.q);
  return lame_eval(tau, m, elliptic::complete_K(m), elliptic::complete_E(m), co).u2;
}

double u2_dot(double tau, const elliptic::Modulus& m) {
  const LameCoefficients co(m.q * m.q);
  return lame_eval(tau, m, elliptic::complete_K(m), elliptic::complete_E(m), co).u2_dot;
}

double mu(const elliptic::Modulus& m) {
  const LameCoefficients co(m.q * m.q);
  return co.beta0 + co.beta1 * elliptic::complete_E(m) / elliptic::complete_K(m);
}

FundamentalPair::FundamentalPair(const OscillatorParams& p) : params_(p) {
  const double qp2 = 1.0 - p.q.q * p.q.q;
  scale_ = -p.omega * qp2 * qp2;
}

FundamentalPair::Values FundamentalPair::eval(double t) const {
  const OscillatorParams& p = params_;
  const double phi = p.omega * t + p.eta_sign * p.i_y;
  const LameCoefficients coeffs(p.q.q * p.q.q);
  const LameEval e = lame_eval(phi, p.q, p.big_k, p.big_e, coeffs);

  Values v;
  v.w1 = e.u1;
  v.w1_dot = p.omega * e.u1_dot;
  v.w2 = e.u2 / scale_;
  v.w2_dot = p.omega * e.u2_dot / scale_;
  v.x0 = p.c - (p.a + 2.0 * p.c) * e.sn2;
  return v;
}

FundamentalPair fundamental_pair(const OscillatorParams& p) { return FundamentalPair(p); }

MonodromyReport monodromy(const std::function<double(double)>& g, double period, int n_steps) {
  if (n_steps < 1) throw std::domain_error("monodromy: n_steps must be positive");
  const double h = period / n_steps;
  std::vector<double> gs(2 * static_cast<std::size_t>(n_steps) + 1);
  for (std::size_t i = 0; i < gs.size(); ++i) gs[i] = g(0.5 * h * static_cast<double>(i));

  double m00 = 1.0, m10 = 0.0;  // column started at (1, 0)
  double m01 = 0.0, m11 = 1.0;  // column started at (0, 1)
  for (int i = 0; i < n_steps; ++i) {
    const double g0 = gs[2 * static_cast<std::size_t>(i)];
    const double gm = gs[2 * static_cast<std::size_t>(i) + 1];
    const double g1 = gs[2 * static_cast<std::size_t>(i) + 2];
    detail::rk4_linear_step(g0, gm, g1, h, m00, m10);
    detail::rk4_linear_step(g0, gm, g1, h, m01, m11);
  }

  MonodromyReport r;
  r.matrix = {{{m00, m01}, {m10, m11}}};
  r.trace = m00 + m11;
  r.det = m00 * m11 - m01 * m10;
  const double half = 0.5 * r.trace;
  const double disc = half * half - r.det;
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    r.eig_re = {half - s, half + s};
    r.eig_im = {0.0, 0.0};
  } else {
    const double s = std::sqrt(-disc);
    r.eig_re = {half, half};
    r.eig_im = {-s, s};
  }
  const double d0 = std::hypot(r.eig_re[0] - 1.0, r.eig_im[0]);
  const double d1 = std::hypot(r.eig_re[1] - 1.0, r.eig_im[1]);
  r.double_unit_eigenvalue = d0 <= 1e-6 && d1 <= 1e-6;
  const double off = std::max(std::max(std::abs(m00 - 1.0), std::abs(m11 - 1.0)),
                              std::max(std::abs(m01), std::abs(m10)));
  r.jordan_nontrivial = r.double_unit_eigenvalue && off > 1e-3;
  return r;
}

MonodromyReport floquet_check(const OscillatorParams& p, int n_steps) {
  return monodromy([&p](double t) { return 2.0 * x0(p, t); }, p.period, n_steps);
}

}  // namespace cubosc::oscillator
