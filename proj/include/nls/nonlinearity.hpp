#pragma once

// The nonlinear term G(|w|^2) of the NLS, its potential V(s) = int_s^1 G,
// the saturating cutoff Theta and the modified potential (Theta^2 - 1)^2.
// G is a polynomial in s = |w|^2; every supported instance is one.

#include <string>
#include <vector>

namespace nls {

struct AssumptionMeta {
  // (Ass2): |G(x)| <= c (1 + x^p0).
  double p0 = 1.0;
  // (Ass3): G(x) <= -c x^p1 for x >= r0. Checked only when claimed.
  bool claims_ass3 = false;
  double ass3_c = 0.0;
  double ass3_p1 = 0.0;
  double ass3_r0 = 0.0;
};

class Nonlinearity {
 public:
  // G(s) = sum_k coeffs[k] s^k.
  Nonlinearity(std::string name, std::vector<double> coeffs,
               std::vector<double> params, AssumptionMeta meta);

  double g(double s) const;
  double g_prime(double s) const;
  // Closed-form antiderivative: V(s) = sum_k a_k (1 - s^{k+1}) / (k+1).
  double v(double s) const;

  const std::string& name() const { return name_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  const std::vector<double>& params() const { return params_; }
  const AssumptionMeta& meta() const { return meta_; }

 private:
  std::string name_;
  std::vector<double> coeffs_;
  std::vector<double> params_;
  AssumptionMeta meta_;
};

// Gross-Pitaevskii: G(s) = 1 - s, V(s) = (1 - s)^2 / 2.
Nonlinearity make_gp();

// Cubic-quintic G(s) = -c1 + c3 s - c5 s^2 with c3 = 2 c1 + 1, c5 = c1 + 1,
// the unique choice giving G(1) = 0 and G'(1) = -1. Throws on c1 <= 0.
Nonlinearity make_cubic_quintic(double c1);

// Arbitrary polynomial G; used for assumption-checker tests.
Nonlinearity make_polynomial(std::string name, std::vector<double> coeffs,
                             AssumptionMeta meta = {});

// Smooth odd cutoff: Theta(x) = x on [0, 2], 3 on [4, inf), with
// Theta'(x) = 1 - S((x - 2) / 2) on (2, 4) where S is the symmetric C^inf
// step S(u) = f(u) / (f(u) + f(1 - u)), f(u) = exp(-1/u).
double theta(double x);
double theta_prime(double x);

// Symmetric C^inf step on [0, 1]: 0 for u <= 0, 1 for u >= 1, S' <= 2.
double smooth_step(double u);
double smooth_step_prime(double u);

// (Theta^2(a) - 1)^2.
double v_mod(double w_abs);

struct AssumptionCheck {
  std::string name;
  bool pass = false;
  bool checked = true;
  std::string detail;
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;
  bool ass1() const;
  bool ass2() const;
  bool ass3() const;
  const AssumptionCheck& find(const std::string& name) const;
};

// Numerical verification of (Ass1)-(Ass3) on a bounded sample. Failures are
// reported, never thrown. Throws ParameterError only for N < 3.
AssumptionReport check_assumptions(const Nonlinearity& nl, int dim);

}  // namespace nls
