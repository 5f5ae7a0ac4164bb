#pragma once

namespace cubosc::elliptic {

// Elliptic modulus q together with the complementary modulus q' = sqrt(1 - q^2).
// Kept as a pair so q'^2 = 1 - q^2 holds to round-off by construction.
struct Modulus {
  double q;
  double q_prime;

  // Throws std::domain_error unless 0 <= q <= 1 - 1e-12 (K diverges at q = 1).
  static Modulus from_q(double q);
};

// Nome p = exp(-pi K'/K) with the quarter periods that define it.
struct Nome {
  double p;
  double k;        // K(q)
  double k_prime;  // K'(q) = K(q'); +infinity when q = 0
  double e;        // E(q)

  static Nome from_modulus(const Modulus& m);
};

// Complete integral of the first kind, F(pi/2, q), by AGM iteration.
double complete_K(const Modulus& m);

// Complete integral of the second kind by the AGM c_n sums.
double complete_E(const Modulus& m);
// Convenience overload accepting the degenerate endpoint q = 1 (E = 1).
double complete_E(double q);

// Incomplete integral of the first kind F(gamma, q) = int_0^gamma dalpha / sqrt(1 - q^2 sin^2 alpha).
// Arbitrary real gamma; reduced by F(gamma + pi) = F(gamma) + 2K.
double incomplete_F(double gamma, const Modulus& m);

struct JacobiTriple {
  double sn;
  double cn;
  double dn;
};

// sn, cn, dn by the descending Landen/AGM phase recursion, after reducing u mod 4K.
JacobiTriple jacobi_sn_cn_dn(double u, const Modulus& m);
// Amplitude am(u, q); am(u + 4K) = am(u) + 2 pi.
double jacobi_am(double u, const Modulus& m);

// Jacobi Epsilon(x, q) = int_0^x dn^2(t, q) dt.  Reduced to the fundamental cell
// [-K, K] via Epsilon(x + 2K) = Epsilon(x) + 2E, then evaluated as E(am(x, q), q).
double jacobi_epsilon(double x, const Modulus& m);

// theta3(0, p) = 1 + 2 sum_{n>=1} p^(n^2).
double theta3_zero(double p);

// d/dz log theta4(z, p) = 4 sum_{n>=1} p^n/(1 - p^(2n)) sin(2nz),
// summed until the term bound falls below 1e-16.
double theta_log_derivative(double z, double p);

// Right-hand side of the Epsilon asymptotic identity:
//   (E/K) x + theta_log_derivative(xi, p) / theta3^2(0, p),  xi = x / theta3^2(0, p).
// Agrees with jacobi_epsilon for all real x.
double epsilon_asymptotic(double x, const Modulus& m);

// Carlson symmetric integrals (building blocks of the incomplete integrals).
double carlson_rf(double x, double y, double z);
double carlson_rd(double x, double y, double z);

// Hot-path variants taking precomputed K(q) (and E(q)) so per-sample evaluation
// avoids re-running the AGM; identical results to the plain overloads.
JacobiTriple jacobi_sn_cn_dn(double u, const Modulus& m, double big_k);
double jacobi_epsilon(double x, const Modulus& m, double big_k, double big_e);

}  // namespace cubosc::elliptic
