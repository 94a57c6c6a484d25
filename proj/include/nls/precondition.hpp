#pragma once

// Fast solver for (a Ax + b Arho + c) z = g on the free nodes, where Ax is the
// Dirichlet three-point -d^2/dx1^2 and Arho the conservative transverse
// operator -rho^{2-N} d/drho rho^{N-2} d/drho (axis regular, Dirichlet at L2).
// Ax is diagonalized by the discrete sine transform; Arho = C^{-1} K is
// diagonalized once through the symmetric pencil C^{-1/2} K C^{-1/2}. The
// operator is self-adjoint and positive in the quadrature inner product, so
// it can serve as a Sobolev metric for gradient descent.

#include <memory>

#include "nls/grid.hpp"

namespace nls {

class Preconditioner {
 public:
  explicit Preconditioner(const Grid& grid);
  ~Preconditioner();
  Preconditioner(Preconditioner&&) noexcept;
  Preconditioner& operator=(Preconditioner&&) noexcept;

  // Solves on `grid`, which must share n1, n2, dim with the construction grid;
  // L1 and L2 may differ (eigenvalues rescale as 1/L^2). Dirichlet nodes of
  // the result are zero.
  ComplexArray apply(const Grid& grid, const ComplexArray& g, double a, double b,
                     double c) const;

  // Reference operator, for tests: (a Ax + b Arho + c) z at free nodes.
  static ComplexArray multiply(const Grid& grid, const ComplexArray& z, double a,
                               double b, double c);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace nls
