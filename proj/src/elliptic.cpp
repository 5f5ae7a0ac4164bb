#include "cubosc/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace cubosc::elliptic {

namespace {

constexpr double kPi = std::numbers::pi;

// AGM iteration shared by K and E.  Returns the common limit a_inf and
// accumulates sum_{n>=0} 2^(n-1) c_n^2 with c_0 = q, c_n = (a_{n-1}-b_{n-1})/2.
double agm(double q, double q_prime, double* c_sum) {
  double a = 1.0, b = q_prime;
  double sum = 0.5 * q * q;
  double pow2 = 0.5;
  for (int n = 0; n < 60 && (a - b) > 2.0 * std::numeric_limits<double>::epsilon() * a; ++n) {
    const double c = 0.5 * (a - b);
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
    pow2 *= 2.0;
    sum += pow2 * c * c;
  }
  if (c_sum != nullptr) *c_sum = sum;
  return a;
}

}  // namespace

Modulus Modulus::from_q(double q) {
  if (!(q >= 0.0 && q <= 1.0 - 1e-12))
    throw std::domain_error("elliptic modulus must lie in [0, 1 - 1e-12]");
  return Modulus{q, std::sqrt((1.0 - q) * (1.0 + q))};
}

double complete_K(const Modulus& m) { return kPi / (2.0 * agm(m.q, m.q_prime, nullptr)); }

double complete_E(const Modulus& m) {
  double c_sum = 0.0;
  const double a_inf = agm(m.q, m.q_prime, &c_sum);
  return kPi / (2.0 * a_inf) * (1.0 - c_sum);
}

double complete_E(double q) {
  if (q == 1.0) return 1.0;  // integrand degenerates to cos(theta)
  return complete_E(Modulus::from_q(q));
}

double carlson_rf(double x, double y, double z) {
  // Carlson's duplication algorithm, DLMF 19.36.1.
  double a0 = (x + y + z) / 3.0;
  double an = a0, xn = x, yn = y, zn = z;
  const double q = std::pow(3.0 * 1e-18, -1.0 / 8.0) *
                   std::max({std::fabs(a0 - x), std::fabs(a0 - y), std::fabs(a0 - z)});
  double mul = 1.0;
  while (q >= mul * std::fabs(an)) {
    const double sx = std::sqrt(xn), sy = std::sqrt(yn), sz = std::sqrt(zn);
    const double lam = sx * sy + sy * sz + sz * sx;
    an = 0.25 * (an + lam);
    xn = 0.25 * (xn + lam);
    yn = 0.25 * (yn + lam);
    zn = 0.25 * (zn + lam);
    mul *= 4.0;
  }
  const double bx = (a0 - x) / (mul * an);
  const double by = (a0 - y) / (mul * an);
  const double bz = -(bx + by);
  const double e2 = bx * by - bz * bz;
  const double e3 = bx * by * bz;
  return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / std::sqrt(an);
}

double carlson_rd(double x, double y, double z) {
  // DLMF 19.36.2 with the running sum of the duplication residues.
  double a0 = (x + y + 3.0 * z) / 5.0;
  double an = a0, xn = x, yn = y, zn = z;
  const double q = std::pow(0.25 * 1e-18, -1.0 / 8.0) *
                   std::max({std::fabs(a0 - x), std::fabs(a0 - y), std::fabs(a0 - z)});
  double mul = 1.0, sum = 0.0;
  while (q >= mul * std::fabs(an)) {
    const double sx = std::sqrt(xn), sy = std::sqrt(yn), sz = std::sqrt(zn);
    const double lam = sx * sy + sy * sz + sz * sx;
    sum += 1.0 / (mul * sz * (zn + lam));
    an = 0.25 * (an + lam);
    xn = 0.25 * (xn + lam);
    yn = 0.25 * (yn + lam);
    zn = 0.25 * (zn + lam);
    mul *= 4.0;
  }
  const double bx = (a0 - x) / (mul * an);
  const double by = (a0 - y) / (mul * an);
  const double bz = -(bx + by) / 3.0;
  const double e2 = bx * by - 6.0 * bz * bz;
  const double e3 = (3.0 * bx * by - 8.0 * bz * bz) * bz;
  const double e4 = 3.0 * (bx * by - bz * bz) * bz * bz;
  const double e5 = bx * by * bz * bz * bz;
  const double series = 1.0 - 3.0 * e2 / 14.0 + e3 / 6.0 + 9.0 * e2 * e2 / 88.0 -
                        3.0 * e4 / 22.0 - 9.0 * e2 * e3 / 52.0 + 3.0 * e5 / 26.0;
  return series / (mul * an * std::sqrt(an)) + 3.0 * sum;
}

namespace {

// F on the fundamental cell |gamma| <= pi/2 via RF.
double incomplete_f_cell(double gamma, const Modulus& m) {
  const double s = std::sin(gamma);
  const double c = std::cos(gamma);
  return s * carlson_rf(c * c, (1.0 - m.q * s) * (1.0 + m.q * s), 1.0);
}

// E (second kind) on the fundamental cell via RF and RD.
double incomplete_e_cell(double phi, const Modulus& m) {
  const double s = std::sin(phi);
  const double c = std::cos(phi);
  const double w = (1.0 - m.q * s) * (1.0 + m.q * s);
  return s * carlson_rf(c * c, w, 1.0) - (m.q * m.q / 3.0) * s * s * s * carlson_rd(c * c, w, 1.0);
}

// Descending-Landen phase chain (A&S 16.4): returns am(u) for |u| <= 2K.
double am_cell(double u, const Modulus& m) {
  double a[40], c[40];
  a[0] = 1.0;
  c[0] = m.q;
  double b = m.q_prime;
  int n = 0;
  while (n < 39 && c[n] > 1e-17 * a[n]) {
    ++n;
    c[n] = 0.5 * (a[n - 1] - b);
    const double an = 0.5 * (a[n - 1] + b);
    b = std::sqrt(a[n - 1] * b);
    a[n] = an;
  }
  double phi = std::ldexp(a[n] * u, n);
  for (int i = n; i >= 1; --i) {
    const double t = std::clamp(c[i] / a[i] * std::sin(phi), -1.0, 1.0);
    phi = 0.5 * (phi + std::asin(t));
  }
  return phi;
}

}  // namespace

double incomplete_F(double gamma, const Modulus& m) {
  if (m.q == 0.0) return gamma;
  const double n = std::round(gamma / kPi);
  const double gr = gamma - n * kPi;  // |gr| <= pi/2
  double f = incomplete_f_cell(gr, m);
  if (n != 0.0) f += 2.0 * n * complete_K(m);
  return f;
}

JacobiTriple jacobi_sn_cn_dn(double u, const Modulus& m, double big_k) {
  if (m.q == 0.0) return {std::sin(u), std::cos(u), 1.0};
  const double ur = u - 4.0 * big_k * std::round(u / (4.0 * big_k));
  const double phi = am_cell(ur, m);
  const double sn = std::sin(phi);
  const double cn = std::cos(phi);
  const double dn = std::sqrt((1.0 - m.q * sn) * (1.0 + m.q * sn));  // dn >= q' > 0
  return {sn, cn, dn};
}

JacobiTriple jacobi_sn_cn_dn(double u, const Modulus& m) {
  if (m.q == 0.0) return {std::sin(u), std::cos(u), 1.0};
  return jacobi_sn_cn_dn(u, m, complete_K(m));
}

double jacobi_am(double u, const Modulus& m) {
  if (m.q == 0.0) return u;
  const double big_k = complete_K(m);
  const double n = std::round(u / (4.0 * big_k));
  return am_cell(u - 4.0 * big_k * n, m) + 2.0 * kPi * n;
}

double jacobi_epsilon(double x, const Modulus& m, double big_k, double big_e) {
  if (m.q == 0.0) return x;
  const double n = std::round(x / (2.0 * big_k));
  const double xr = x - 2.0 * big_k * n;  // |xr| <= K, so am(xr) lies in [-pi/2, pi/2]
  return 2.0 * n * big_e + incomplete_e_cell(am_cell(xr, m), m);
}

double jacobi_epsilon(double x, const Modulus& m) {
  if (m.q == 0.0) return x;
  return jacobi_epsilon(x, m, complete_K(m), complete_E(m));
}

Nome Nome::from_modulus(const Modulus& m) {
  const double big_k = complete_K(m);
  const double big_e = complete_E(m);
  if (m.q == 0.0) return Nome{0.0, big_k, std::numeric_limits<double>::infinity(), big_e};
  if (m.q_prime > 1.0 - 1e-12) {
    // q below ~1.4e-6: K'(q) ~ log(4/q), so p ~ (q/4)^2 to relative O(q^2).
    const double kp = std::log(4.0 / m.q);
    return Nome{(m.q / 4.0) * (m.q / 4.0), big_k, kp, big_e};
  }
  const double kp = complete_K(Modulus::from_q(m.q_prime));
  return Nome{std::exp(-kPi * kp / big_k), big_k, kp, big_e};
}

double theta3_zero(double p) {
  if (!(p >= 0.0 && p < 1.0)) throw std::domain_error("nome must lie in [0, 1)");
  double sum = 1.0;
  double pw = 1.0;  // p^(n^2) built up via p^(n^2) = p^((n-1)^2) * p^(2n-1)
  double odd = p;
  for (int n = 1; n < 200; ++n) {
    pw *= odd;
    odd *= p * p;
    const double term = 2.0 * pw;
    sum += term;
    if (term < 1e-18) break;
  }
  return sum;
}

double theta_log_derivative(double z, double p) {
  if (!(p >= 0.0 && p < 1.0)) throw std::domain_error("nome must lie in [0, 1)");
  if (p == 0.0) return 0.0;
  double sum = 0.0;
  double pn = 1.0, p2n = 1.0;
  const double p2 = p * p;
  for (int n = 1; n < 200000; ++n) {
    pn *= p;
    p2n *= p2;
    const double coeff = 4.0 * pn / (1.0 - p2n);
    sum += coeff * std::sin(2.0 * n * z);
    if (coeff < 1e-16) return sum;
  }
  throw std::runtime_error("theta series failed to converge");
}

double epsilon_asymptotic(double x, const Modulus& m) {
  const Nome nome = Nome::from_modulus(m);
  const double th3 = theta3_zero(nome.p);
  const double th3sq = th3 * th3;
  return nome.e / nome.k * x + theta_log_derivative(x / th3sq, nome.p) / th3sq;
}

}  // namespace cubosc::elliptic
