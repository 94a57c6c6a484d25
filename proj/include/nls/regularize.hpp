#pragma once

// Regularization of a rough field w by minimizing
//
//   A_h(u) = E_Mod(u) + h^{-2} int Theta(|w - u|^2)
//
// over u agreeing with w outside an open box U (and on its edges).

#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "nls/functionals.hpp"
#include "nls/grid.hpp"

namespace nls {

struct RegularizeOptions {
  Box box{};              // U; empty means the whole grid
  int max_iters = 20000;
  double tol = 1e-6;     // stop when el_residual <= tol * ||grad u||
  double step = 1.0;
};

struct RegularizeReport {
  double h = 0.0;
  double e_mod_w = 0.0;      // over U
  double e_mod_u = 0.0;      // over U
  double l2_dist = 0.0;      // ||u - w||_{L^2}
  double vmod_gap = 0.0;     // int |V_Mod(u) - V_Mod(w)|, V_Mod = (Theta^2 - 1)^2 / 2
  double p_gap = 0.0;        // |P(u) - P(w)|
  double el_residual = 0.0;  // ||half the A_h gradient|| over the free nodes of U
  double grad_norm = 0.0;    // ||grad u||_{L^2}
  double modulus_sup = 0.0;  // max | |u| - 1 | over the free nodes of U
  double a_h = 0.0;          // A_h(u)
  int iterations = 0;
  bool converged = false;
};

nlohmann::json to_json(const RegularizeReport& r);

double a_h_value(const Field& u, const Field& w, double h);

// Euler-Lagrange residual field: -Lap u + (Theta^2 - 1) Theta Theta' u/|u|
// + h^{-2} Theta'(|u - w|^2)(u - w) at the free nodes, zero elsewhere.
ComplexArray el_residual_field(const Field& u, const Field& w, double h);

// Throws ParameterError on h <= 0 or a box outside the grid; failure to reach
// the tolerance is reported through converged = false.
std::pair<Field, RegularizeReport> regularize(const Field& w, double h,
                                              RegularizeOptions opts = {});

struct ModulusControlReport {
  double threshold = 0.0;  // E_Mod level below which the check applies
  double e_mod = 0.0;
  bool applicable = false;
  double sup = 0.0;        // max | |u_h| - 1 | on the inner box
  double eps = 0.0;
  bool pass = false;       // applicable and sup < eps
  Box inner{};
  std::string note;
};

nlohmann::json to_json(const ModulusControlReport& r);

// Empirical E_Mod threshold eps^2 h^{N-2} used by modulus_control, calibrated
// on smooth and localized perturbations of the constant state.
double modulus_threshold(int dim, double h, double eps);

ModulusControlReport modulus_control(const Field& w, double h, double eps, double r0);

}  // namespace nls
