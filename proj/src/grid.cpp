#include "nls/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nls/errors.hpp"

namespace nls {

Grid Grid::make(int dim, double L1, double L2, int n1, int n2) {
  if (dim < 3) throw ParameterError("grid: dimension N must be >= 3");
  if (!(L1 > 0.0) || !(L2 > 0.0) || !std::isfinite(L1) || !std::isfinite(L2))
    throw ParameterError("grid: L1 and L2 must be positive and finite");
  if (n1 < 4 || n2 < 4) throw ParameterError("grid: n1 and n2 must be >= 4");
  return Grid{dim, L1, L2, n1, n2};
}

double Grid::sphere_factor() const {
  // |S^{m-1}| = 2 pi^{m/2} / Gamma(m/2) with m = N - 1.
  const double m = dim - 1;
  return 2.0 * std::pow(std::numbers::pi, m / 2.0) / std::tgamma(m / 2.0);
}

bool operator==(const Grid& a, const Grid& b) {
  return a.dim == b.dim && a.L1 == b.L1 && a.L2 == b.L2 && a.n1 == b.n1 &&
         a.n2 == b.n2;
}

Quadrature quadrature(const Grid& g) {
  Quadrature q;
  const double h1 = g.h1();
  const double h2 = g.h2();
  const double sf = g.sphere_factor();
  const int p = g.dim - 1;
  q.wx.assign(g.n1, h1);
  q.wx.front() = q.wx.back() = 0.5 * h1;
  q.wr.resize(g.n2);
  for (int k = 0; k < g.n2; ++k) {
    const double a = std::max(0.0, (k - 0.5) * h2);
    const double b = std::min(g.L2, (k + 0.5) * h2);
    q.wr[k] = sf * (std::pow(b, p) - std::pow(a, p)) / p;
  }
  q.area.resize(g.n2 - 1);
  for (int k = 0; k + 1 < g.n2; ++k)
    q.area[k] = sf * std::pow((k + 0.5) * h2, g.dim - 2);
  return q;
}

Field Field::constant(const Grid& grid, double phase) {
  Field f{grid, ComplexArray(grid.size(), std::polar(1.0, phase)), phase};
  return f;
}

cplx Field::boundary_value() const { return std::polar(1.0, boundary_phase); }

void Field::apply_boundary() {
  const cplx c = boundary_value();
  for (int i = 0; i < grid.n1; ++i) {
    for (int k = 0; k < grid.n2; ++k) {
      if (grid.is_boundary(i, k)) at(i, k) = c;
    }
  }
}

double Field::boundary_defect() const {
  const cplx c = boundary_value();
  double worst = 0.0;
  for (int i = 0; i < grid.n1; ++i) {
    for (int k = 0; k < grid.n2; ++k) {
      if (grid.is_boundary(i, k)) worst = std::max(worst, std::abs(at(i, k) - c));
    }
  }
  return worst;
}

namespace {

void check_shape(const Grid& g, std::size_t n, const char* what) {
  if (n != g.size())
    throw InputError(std::string(what) + ": array size " + std::to_string(n) +
                     " does not match grid " + std::to_string(g.n1) + "x" +
                     std::to_string(g.n2));
}

}  // namespace

double integrate(const Grid& grid, std::span<const double> f) {
  check_shape(grid, f.size(), "integrate");
  const Quadrature q = quadrature(grid);
  double sum = 0.0;
  for (int i = 0; i < grid.n1; ++i) {
    double row = 0.0;
    for (int k = 0; k < grid.n2; ++k) row += q.wr[k] * f[grid.index(i, k)];
    sum += q.wx[i] * row;
  }
  return sum;
}

double inner(const Quadrature& q, const Grid& grid, std::span<const cplx> a,
             std::span<const cplx> b) {
  check_shape(grid, a.size(), "inner");
  check_shape(grid, b.size(), "inner");
  double sum = 0.0;
  for (int i = 0; i < grid.n1; ++i) {
    double row = 0.0;
    const std::size_t base = grid.index(i, 0);
    for (int k = 0; k < grid.n2; ++k) {
      const cplx x = a[base + k];
      const cplx y = b[base + k];
      row += q.wr[k] * (x.real() * y.real() + x.imag() * y.imag());
    }
    sum += q.wx[i] * row;
  }
  return sum;
}

double inner(const Grid& grid, std::span<const cplx> a, std::span<const cplx> b) {
  return inner(quadrature(grid), grid, a, b);
}

ComplexArray d_x1(const Field& w) {
  const Grid& g = w.grid;
  check_shape(g, w.values.size(), "d_x1");
  const double inv2h = 0.5 / g.h1();
  ComplexArray out(g.size());
  const int n1 = g.n1;
  for (int k = 0; k < g.n2; ++k) {
    out[g.index(0, k)] =
        (-3.0 * w.at(0, k) + 4.0 * w.at(1, k) - w.at(2, k)) * inv2h;
    for (int i = 1; i + 1 < n1; ++i)
      out[g.index(i, k)] = (w.at(i + 1, k) - w.at(i - 1, k)) * inv2h;
    out[g.index(n1 - 1, k)] = (3.0 * w.at(n1 - 1, k) - 4.0 * w.at(n1 - 2, k) +
                               w.at(n1 - 3, k)) *
                              inv2h;
  }
  return out;
}

ComplexArray d_rho(const Field& w) {
  const Grid& g = w.grid;
  check_shape(g, w.values.size(), "d_rho");
  const double inv2h = 0.5 / g.h2();
  const int n2 = g.n2;
  ComplexArray out(g.size());
  for (int i = 0; i < g.n1; ++i) {
    out[g.index(i, 0)] = 0.0;
    for (int k = 1; k + 1 < n2; ++k)
      out[g.index(i, k)] = (w.at(i, k + 1) - w.at(i, k - 1)) * inv2h;
    out[g.index(i, n2 - 1)] = (3.0 * w.at(i, n2 - 1) - 4.0 * w.at(i, n2 - 2) +
                               w.at(i, n2 - 3)) *
                              inv2h;
  }
  return out;
}

ComplexArray d2_x1(const Field& w) {
  const Grid& g = w.grid;
  check_shape(g, w.values.size(), "d2_x1");
  const double ih2 = 1.0 / (g.h1() * g.h1());
  const int n1 = g.n1;
  ComplexArray out(g.size());
  for (int k = 0; k < g.n2; ++k) {
    out[g.index(0, k)] = (2.0 * w.at(0, k) - 5.0 * w.at(1, k) +
                          4.0 * w.at(2, k) - w.at(3, k)) *
                         ih2;
    for (int i = 1; i + 1 < n1; ++i)
      out[g.index(i, k)] =
          (w.at(i + 1, k) - 2.0 * w.at(i, k) + w.at(i - 1, k)) * ih2;
    out[g.index(n1 - 1, k)] = (2.0 * w.at(n1 - 1, k) - 5.0 * w.at(n1 - 2, k) +
                               4.0 * w.at(n1 - 3, k) - w.at(n1 - 4, k)) *
                              ih2;
  }
  return out;
}

ComplexArray laplacian_transverse(const Field& w) {
  const Grid& g = w.grid;
  check_shape(g, w.values.size(), "laplacian_transverse");
  const Quadrature q = quadrature(g);
  const double h = g.h2();
  const int n2 = g.n2;
  ComplexArray out(g.size());
  for (int i = 0; i < g.n1; ++i) {
    for (int k = 0; k + 1 < n2; ++k) {
      cplx flux = q.area[k] * (w.at(i, k + 1) - w.at(i, k));
      if (k > 0) flux -= q.area[k - 1] * (w.at(i, k) - w.at(i, k - 1));
      out[g.index(i, k)] = flux / (h * q.wr[k]);
    }
    // Outer Dirichlet row: non-conservative one-sided form.
    const int k = n2 - 1;
    const cplx d2 = (2.0 * w.at(i, k) - 5.0 * w.at(i, k - 1) +
                     4.0 * w.at(i, k - 2) - w.at(i, k - 3)) /
                    (h * h);
    const cplx d1 =
        (3.0 * w.at(i, k) - 4.0 * w.at(i, k - 1) + w.at(i, k - 2)) / (2.0 * h);
    out[g.index(i, k)] = d2 + (g.dim - 2) / g.rho(k) * d1;
  }
  return out;
}

void zero_boundary(const Grid& g, std::span<cplx> a) {
  check_shape(g, a.size(), "zero_boundary");
  for (int k = 0; k < g.n2; ++k) {
    a[g.index(0, k)] = 0.0;
    a[g.index(g.n1 - 1, k)] = 0.0;
  }
  for (int i = 0; i < g.n1; ++i) a[g.index(i, g.n2 - 1)] = 0.0;
}

}  // namespace nls
