#pragma once

#include <array>
#include <functional>

#include "cubosc/elliptic.hpp"

namespace cubosc::oscillator {

// Periodic orbit of x'' = x^2 - B selected by the cubic roots a, c of the
// turning-point polynomial and the starting position y on the orbit.
// Requires c < 0 < a, 2c + a < 0 and c + 2a > 0 (bounded non-degenerate
// orbit), and y between c and the middle root -a-c.
struct OscillatorParams {
  double a = 0.0;
  double c = 0.0;
  double y = 0.0;
  int eta_sign = 1;  // sign of the initial velocity, +1 or -1

  double big_b = 0.0;  // forcing constant B = (a^2 + c^2 + a c) / 3
  elliptic::Modulus q{};
  double omega = 0.0;   // time scale sqrt((a - c) / 6)
  double i_y = 0.0;     // phase offset F(asin sqrt((c - y)/(2c + a)), q)
  double period = 0.0;  // orbit period 2 K(q) / omega
  double big_k = 0.0;   // K(q)
  double big_e = 0.0;   // E(q)

  double middle_root() const { return -a - c; }

  static OscillatorParams make(double a, double c, double y, int eta_sign = 1);
};

// Conserved energy H(x, xi) = xi^2/2 - x^3/3 + B x.
double hamiltonian(double x, double xi, double big_b);

// Energy level of the selected orbit, a c (a + c) / 3.
double orbit_energy(const OscillatorParams& p);

// Velocity at t = 0 consistent with (y, eta_sign) on the orbit.
double initial_velocity(const OscillatorParams& p);

// Unperturbed solution x0(t) = c - (a + 2c) sn^2(omega t + eta_sign i_y, q)
// and its time derivative.
double x0(const OscillatorParams& p, double t);
double x0_dot(const OscillatorParams& p, double t);

// Eigenvalue h of the variational (Lame, nu = 3) equation
//   u'' + (h - 12 q^2 sn^2(tau, q)) u = 0
// in the scaled time tau = omega t + eta_sign i_y.  Evaluates both closed
// forms 12 c / (c - a) and 4 + 4 q^2 and checks they agree.
double lame_eigenvalue(const OscillatorParams& p);

// Fundamental solutions of the nu = 3 Lame equation at its second eigenvalue,
// in the scaled time tau.  u1 is the periodic solution sn cn dn with u1(0) = 0,
// u1'(0) = 1; u2 is the independent solution with a linear-growth part,
// u2 = C(tau) + D(tau) u1(tau) with C a polynomial in cn^2 and
// D(tau) = beta0 tau + beta1 epsilon(tau).
double u1(double tau, const elliptic::Modulus& m);
double u1_dot(double tau, const elliptic::Modulus& m);
double u2(double tau, const elliptic::Modulus& m);
double u2_dot(double tau, const elliptic::Modulus& m);

// Mean slope of the growing solution: u2(tau + 2K) = u2(tau) + 2K mu u1(tau).
double mu(const elliptic::Modulus& m);

// Wronskian-normalised fundamental pair for the variational equation around
// x0 in physical time: w1'' = 2 x0(t) w1, W(w1, w2) = 1.
class FundamentalPair {
 public:
  explicit FundamentalPair(const OscillatorParams& p);

  struct Values {
    double w1 = 0.0;
    double w2 = 0.0;
    double w1_dot = 0.0;
    double w2_dot = 0.0;
    double x0 = 0.0;
  };

  // Evaluates both solutions, their derivatives and x0 at physical time t.
  Values eval(double t) const;

  double w1(double t) const { return eval(t).w1; }
  double w2(double t) const { return eval(t).w2; }
  double w1_dot(double t) const { return eval(t).w1_dot; }
  double w2_dot(double t) const { return eval(t).w2_dot; }

  const OscillatorParams& params() const { return params_; }

  // Raw Wronskian of the unscaled pair (u1, u2) in physical time; w2 is the
  // unscaled second solution divided by this value.
  double wronskian_scale() const { return scale_; }

 private:
  OscillatorParams params_;
  double scale_;  // -omega (1 - q^2)^2
};

FundamentalPair fundamental_pair(const OscillatorParams& p);

// Monodromy matrix of u'' = g(t) u over one period, integrated with RK4 on a
// uniform grid of n_steps steps.
struct MonodromyReport {
  std::array<std::array<double, 2>, 2> matrix{};
  double trace = 0.0;
  double det = 0.0;
  std::array<double, 2> eig_re{};
  std::array<double, 2> eig_im{};
  bool double_unit_eigenvalue = false;  // both eigenvalues within 1e-6 of 1
  bool jordan_nontrivial = false;       // double unit eigenvalue, M far from I
};

MonodromyReport monodromy(const std::function<double(double)>& g, double period, int n_steps);

// Monodromy of the variational equation around x0 over one orbit period.
// The periodic orbit sits at a double unit eigenvalue with a nontrivial
// Jordan block (the linear-growth direction), so linear stability is marginal.
MonodromyReport floquet_check(const OscillatorParams& p, int n_steps = 1 << 17);

}  // namespace cubosc::oscillator
