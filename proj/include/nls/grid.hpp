#pragma once

// Axisymmetric discretization of fields on R^N that depend only on
// (x1, rho = |x_perp|). Nodes are x1_i = -L1 + i*h1 (i = 0..n1-1) and
// rho_k = k*h2 (k = 0..n2-1). The edges x1 = +-L1 and rho = L2 carry the
// Dirichlet value exp(i*phi0); the axis rho = 0 is a regular interior row.
//
// Radial quadrature uses finite-volume cells [rho_k - h2/2, rho_k + h2/2]
// clipped to [0, L2], weighted by the exact measure |S^{N-2}| rho^{N-2} drho.
// With this choice the discrete transverse Laplacian is the exact weighted
// adjoint of the edge-difference gradient and reduces to (N-1) d^2/drho^2 on
// the axis.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace nls {

using cplx = std::complex<double>;
using ComplexArray = std::vector<cplx>;
using RealArray = std::vector<double>;

struct Grid {
  int dim = 3;
  double L1 = 20.0;
  double L2 = 20.0;
  int n1 = 256;
  int n2 = 128;

  // Validating constructor; throws ParameterError.
  static Grid make(int dim, double L1, double L2, int n1, int n2);

  double h1() const { return 2.0 * L1 / (n1 - 1); }
  double h2() const { return L2 / (n2 - 1); }
  double x1(int i) const { return -L1 + i * h1(); }
  double rho(int k) const { return k * h2(); }
  std::size_t size() const { return static_cast<std::size_t>(n1) * n2; }
  std::size_t index(int i, int k) const {
    return static_cast<std::size_t>(i) * n2 + k;
  }
  bool is_boundary(int i, int k) const {
    return i == 0 || i == n1 - 1 || k == n2 - 1;
  }

  // Surface area of the unit sphere in R^{N-1}.
  double sphere_factor() const;
};

bool operator==(const Grid& a, const Grid& b);

// Precomputed one-dimensional weight factors; weight(i,k) = wx[i] * wr[k].
struct Quadrature {
  RealArray wx;    // trapezoid weights in x1
  RealArray wr;    // sphere_factor * integral of rho^{N-2} over radial cell k
  RealArray area;  // sphere_factor * rho_{k+1/2}^{N-2}, size n2-1
  double weight(int i, int k) const { return wx[i] * wr[k]; }
};

Quadrature quadrature(const Grid& grid);

struct Field {
  Grid grid;
  ComplexArray values;
  double boundary_phase = 0.0;

  // Constant field exp(i*phase) everywhere.
  static Field constant(const Grid& grid, double phase = 0.0);

  cplx boundary_value() const;
  cplx& at(int i, int k) { return values[grid.index(i, k)]; }
  const cplx& at(int i, int k) const { return values[grid.index(i, k)]; }
  // Overwrites the Dirichlet edges with the boundary value.
  void apply_boundary();
  // Max deviation of the Dirichlet edges from the boundary value.
  double boundary_defect() const;
};

// Sum of weights * f over all nodes.
double integrate(const Grid& grid, std::span<const double> f);

// Weighted real inner product sum W Re(a conj(b)).
double inner(const Grid& grid, std::span<const cplx> a, std::span<const cplx> b);
double inner(const Quadrature& q, const Grid& grid, std::span<const cplx> a,
             std::span<const cplx> b);

// Central differences in the interior, second-order one-sided at the x1
// edges and at rho = L2; d_rho vanishes on the axis (even extension).
ComplexArray d_x1(const Field& w);
ComplexArray d_rho(const Field& w);
// Three-point second derivative in x1 (one-sided four-point at the edges).
ComplexArray d2_x1(const Field& w);
// Conservative rho^{-(N-2)} d/drho (rho^{N-2} dw/drho).
ComplexArray laplacian_transverse(const Field& w);

// Zeroes the Dirichlet nodes of a grid function in place.
void zero_boundary(const Grid& grid, std::span<cplx> a);

}  // namespace nls
