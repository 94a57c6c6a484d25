#include "nls/precondition.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "nls/errors.hpp"

namespace nls {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

struct Preconditioner::Impl {
  Grid ref;
  int m1 = 0, m2 = 0;
  Mat sine;         // m1 x m1, orthonormal
  Vec eig_x;        // at ref.h1
  Mat right;        // C^{1/2} Q, m2 x m2
  Mat right_inv_t;  // Q^T C^{-1/2}, m2 x m2
  Vec eig_r;        // at ref.h2
};

Preconditioner::Preconditioner(const Grid& grid) : impl_(std::make_unique<Impl>()) {
  Impl& p = *impl_;
  p.ref = grid;
  p.m1 = grid.n1 - 2;
  p.m2 = grid.n2 - 1;
  const int m1 = p.m1, m2 = p.m2;
  const double pi = std::numbers::pi;

  p.sine.resize(m1, m1);
  p.eig_x.resize(m1);
  const double norm = std::sqrt(2.0 / (m1 + 1));
  const double h1 = grid.h1();
  for (int q = 0; q < m1; ++q) {
    const double s = std::sin(pi * (q + 1) / (2.0 * (m1 + 1)));
    p.eig_x(q) = 4.0 * s * s / (h1 * h1);
    for (int i = 0; i < m1; ++i) p.sine(i, q) = norm * std::sin(pi * (i + 1) * (q + 1) / (m1 + 1));
  }

  const Quadrature quad = quadrature(grid);
  const double h2 = grid.h2();
  Mat b = Mat::Zero(m2, m2);
  Vec c_sqrt(m2);
  for (int k = 0; k < m2; ++k) c_sqrt(k) = std::sqrt(quad.wr[k]);
  for (int k = 0; k < m2; ++k) {
    double diag = quad.area[k];
    if (k > 0) diag += quad.area[k - 1];
    b(k, k) = diag / h2;
    if (k + 1 < m2) {
      b(k, k + 1) = -quad.area[k] / h2;
      b(k + 1, k) = -quad.area[k] / h2;
    }
  }
  for (int r = 0; r < m2; ++r)
    for (int c = 0; c < m2; ++c) b(r, c) /= c_sqrt(r) * c_sqrt(c);
  Eigen::SelfAdjointEigenSolver<Mat> es(b);
  if (es.info() != Eigen::Success) throw NumericError("preconditioner: eigensolver failed");
  p.eig_r = es.eigenvalues();
  const Mat& q = es.eigenvectors();
  p.right = c_sqrt.asDiagonal() * q;
  p.right_inv_t = q.transpose() * c_sqrt.cwiseInverse().asDiagonal();
}

Preconditioner::~Preconditioner() = default;
Preconditioner::Preconditioner(Preconditioner&&) noexcept = default;
Preconditioner& Preconditioner::operator=(Preconditioner&&) noexcept = default;

ComplexArray Preconditioner::apply(const Grid& grid, const ComplexArray& g, double a,
                                   double b, double c) const {
  const Impl& p = *impl_;
  if (grid.n1 != p.ref.n1 || grid.n2 != p.ref.n2 || grid.dim != p.ref.dim)
    throw InputError("preconditioner: grid shape mismatch");
  if (g.size() != grid.size()) throw InputError("preconditioner: array size mismatch");
  const int m1 = p.m1, m2 = p.m2;
  const double sx = std::pow(p.ref.h1() / grid.h1(), 2);
  const double sr = std::pow(p.ref.h2() / grid.h2(), 2);

  Mat re(m1, m2), im(m1, m2);
  for (int i = 0; i < m1; ++i)
    for (int k = 0; k < m2; ++k) {
      const cplx v = g[grid.index(i + 1, k)];
      re(i, k) = v.real();
      im(i, k) = v.imag();
    }
  auto solve = [&](Mat& m) {
    Mat hat = p.sine.transpose() * m * p.right;
    for (int k = 0; k < m2; ++k)
      for (int i = 0; i < m1; ++i)
        hat(i, k) /= a * sx * p.eig_x(i) + b * sr * p.eig_r(k) + c;
    m.noalias() = p.sine * hat * p.right_inv_t;
  };
  solve(re);
  solve(im);

  ComplexArray out(grid.size(), 0.0);
  for (int i = 0; i < m1; ++i)
    for (int k = 0; k < m2; ++k) out[grid.index(i + 1, k)] = cplx(re(i, k), im(i, k));
  return out;
}

ComplexArray Preconditioner::multiply(const Grid& grid, const ComplexArray& z, double a,
                                      double b, double c) {
  const Quadrature quad = quadrature(grid);
  const double h1 = grid.h1(), h2 = grid.h2();
  ComplexArray out(grid.size(), 0.0);
  auto val = [&](int i, int k) -> cplx {
    return grid.is_boundary(i, k) ? cplx(0.0) : z[grid.index(i, k)];
  };
  for (int i = 1; i + 1 < grid.n1; ++i) {
    for (int k = 0; k + 1 < grid.n2; ++k) {
      const cplx u = val(i, k);
      const cplx ax = (2.0 * u - val(i - 1, k) - val(i + 1, k)) / (h1 * h1);
      cplx flux = quad.area[k] * (u - val(i, k + 1));
      if (k > 0) flux += quad.area[k - 1] * (u - val(i, k - 1));
      const cplx ar = flux / (h2 * quad.wr[k]);
      out[grid.index(i, k)] = a * ax + b * ar + c * u;
    }
  }
  return out;
}

}  // namespace nls
