#pragma once

// Discrete energy-type functionals on axisymmetric fields and their exact
// first variations.
//
// The gradient terms are sums over grid edges, so their Riesz gradients (with
// respect to the quadrature inner product) are exactly the three-point x1
// second difference and the conservative transverse Laplacian. The momentum
// is renormalized against the boundary value c = exp(i*phi0):
//
//   P(w) = int <i dw/dx1, w - c>,
//
// which drops the exact x1-derivative <i w_x1, c> that the abstract
// definition discards.

#include <nlohmann/json.hpp>

#include "nls/grid.hpp"
#include "nls/nonlinearity.hpp"

namespace nls {

struct FunctionalReport {
  double e = 0.0;      // energy
  double e_mod = 0.0;  // modified Ginzburg-Landau energy
  double p = 0.0;      // x1-momentum
  double t = 0.0;      // transverse kinetic energy
  double j = 0.0;      // -(int |w_x1|^2 + V + nu P)
  double s = 0.0;      // action e + nu p
  double poh = 0.0;    // (N-3)/(N-1) t - j
  double nu = 0.0;
  int dim = 3;
  // Components, kept for the integral identities.
  double kinetic_x1 = 0.0;
  double potential = 0.0;
};

nlohmann::json to_json(const FunctionalReport& r);
FunctionalReport report_from_json(const nlohmann::json& j);

// Speeds must lie in [0, sqrt(2)); throws ParameterError otherwise.
void check_speed(double nu);

double kinetic_x1(const Field& w);
double kinetic_transverse(const Field& w);  // T
double potential(const Field& w, const Nonlinearity& nl);
double potential_mod(const Field& w);  // int (Theta^2(|w|) - 1)^2 / 2
double momentum(const Field& w);

FunctionalReport evaluate(const Field& w, const Nonlinearity& nl, double nu);

// Inclusive index box [i0, i1] x [k0, k1]; empty when i1 < i0 or k1 < k0.
struct Box {
  int i0 = 0, i1 = -1, k0 = 0, k1 = -1;
  static Box whole(const Grid& g) { return Box{0, g.n1 - 1, 0, g.n2 - 1}; }
  bool empty() const { return i1 < i0 || k1 < k0; }
};

// Per-node energy density times weight; each edge term is split evenly
// between its endpoints so box sums are additive and the whole-grid sum
// equals the global E_Mod.
RealArray e_mod_density(const Field& w);
double e_mod_local(const Field& w, const Box& box);

// Riesz gradients; zero on the Dirichlet nodes.
ComplexArray grad_T(const Field& w);
ComplexArray grad_J(const Field& w, const Nonlinearity& nl, double nu);
ComplexArray grad_E(const Field& w, const Nonlinearity& nl);
ComplexArray grad_P(const Field& w);
ComplexArray grad_E_mod(const Field& w);

struct MomentumBound {
  bool applicable = false;
  bool holds = false;
  double sup_deviation = 0.0;  // max | |w| - 1 |
  double lhs = 0.0;            // |P|
  double rhs = 0.0;            // E_Mod / (sqrt(2) (1 - eps))
};

MomentumBound check_momentum_bound(const Field& w, double eps);

// Normalized residual of -i nu w_x1 + Lap w + G(|w|^2) w over the free nodes.
double pde_residual(const Field& w, const Nonlinearity& nl, double nu);
// Same, with the transverse Laplacian scaled by `transverse_scale`.
double pde_residual_scaled(const Field& w, const Nonlinearity& nl, double nu,
                           double transverse_scale);

}  // namespace nls
