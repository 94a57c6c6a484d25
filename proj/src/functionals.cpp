#include "nls/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nls/errors.hpp"

namespace nls {

namespace {

// <i a, b> = Re(i a conj(b)) = -Im(a conj(b)).
inline double dot_i(cplx a, cplx b) { return -(a * std::conj(b)).imag(); }
inline double dot(cplx a, cplx b) {
  return a.real() * b.real() + a.imag() * b.imag();
}

inline double half_vmod(double a) {
  if (a <= 2.0) {
    const double d = a * a - 1.0;
    return 0.5 * d * d;
  }
  return 0.5 * v_mod(a);
}

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw NumericError(std::string(what) + " is not finite");
}

// -2 x (three-point second difference in x1) at free nodes, zero elsewhere,
// added into `out` scaled by `scale`.
void add_d2x(const Field& w, double scale, ComplexArray& out) {
  const Grid& g = w.grid;
  const double c = scale / (g.h1() * g.h1());
  for (int i = 1; i + 1 < g.n1; ++i) {
    const cplx* prev = &w.values[g.index(i - 1, 0)];
    const cplx* cur = &w.values[g.index(i, 0)];
    const cplx* next = &w.values[g.index(i + 1, 0)];
    cplx* o = &out[g.index(i, 0)];
    for (int k = 0; k + 1 < g.n2; ++k) o[k] += c * (next[k] - 2.0 * cur[k] + prev[k]);
  }
}

void add_lap_perp(const Field& w, const Quadrature& q, double scale,
                  ComplexArray& out) {
  const Grid& g = w.grid;
  const double h = g.h2();
  RealArray inv(g.n2);
  for (int k = 0; k + 1 < g.n2; ++k) inv[k] = scale / (h * q.wr[k]);
  for (int i = 1; i + 1 < g.n1; ++i) {
    const cplx* r = &w.values[g.index(i, 0)];
    cplx* o = &out[g.index(i, 0)];
    cplx flux_lo = 0.0;
    for (int k = 0; k + 1 < g.n2; ++k) {
      const cplx flux_hi = q.area[k] * (r[k + 1] - r[k]);
      o[k] += inv[k] * (flux_hi - flux_lo);
      flux_lo = flux_hi;
    }
  }
}

void add_d1x(const Field& w, cplx scale, ComplexArray& out) {
  const Grid& g = w.grid;
  const cplx c = scale * (0.5 / g.h1());
  for (int i = 1; i + 1 < g.n1; ++i) {
    const cplx* prev = &w.values[g.index(i - 1, 0)];
    const cplx* next = &w.values[g.index(i + 1, 0)];
    cplx* o = &out[g.index(i, 0)];
    for (int k = 0; k + 1 < g.n2; ++k) o[k] += c * (next[k] - prev[k]);
  }
}

void add_nonlinear(const Field& w, const Nonlinearity& nl, double scale,
                   ComplexArray& out) {
  const Grid& g = w.grid;
  for (int i = 1; i + 1 < g.n1; ++i) {
    for (int k = 0; k + 1 < g.n2; ++k) {
      const std::size_t n = g.index(i, k);
      out[n] += scale * nl.g(std::norm(w.values[n])) * w.values[n];
    }
  }
}

}  // namespace

void check_speed(double nu) {
  if (!(nu >= 0.0) || !(nu < std::numbers::sqrt2))
    throw ParameterError(
        "nu must lie in [0, sqrt(2)): no finite-energy traveling waves exist at "
        "supersonic speed");
}

double kinetic_x1(const Field& w) {
  const Grid& g = w.grid;
  const Quadrature q = quadrature(g);
  const double ih = 1.0 / g.h1();
  double sum = 0.0;
  for (int i = 0; i + 1 < g.n1; ++i) {
    const cplx* a = &w.values[g.index(i, 0)];
    const cplx* b = &w.values[g.index(i + 1, 0)];
    for (int k = 0; k < g.n2; ++k) sum += q.wr[k] * std::norm(b[k] - a[k]);
  }
  return sum * ih;
}

double kinetic_transverse(const Field& w) {
  const Grid& g = w.grid;
  const Quadrature q = quadrature(g);
  const double ih = 1.0 / g.h2();
  double sum = 0.0;
  for (int i = 0; i < g.n1; ++i) {
    const cplx* r = &w.values[g.index(i, 0)];
    double row = 0.0;
    for (int k = 0; k + 1 < g.n2; ++k) row += q.area[k] * std::norm(r[k + 1] - r[k]);
    sum += q.wx[i] * row;
  }
  return sum * ih;
}

double potential(const Field& w, const Nonlinearity& nl) {
  const Grid& g = w.grid;
  const Quadrature q = quadrature(g);
  double sum = 0.0;
  for (int i = 0; i < g.n1; ++i) {
    double row = 0.0;
    for (int k = 0; k < g.n2; ++k) row += q.wr[k] * nl.v(std::norm(w.at(i, k)));
    sum += q.wx[i] * row;
  }
  return sum;
}

double potential_mod(const Field& w) {
  const Grid& g = w.grid;
  const Quadrature q = quadrature(g);
  double sum = 0.0;
  for (int i = 0; i < g.n1; ++i) {
    double row = 0.0;
    for (int k = 0; k < g.n2; ++k) row += q.wr[k] * half_vmod(std::abs(w.at(i, k)));
    sum += q.wx[i] * row;
  }
  return sum;
}

double momentum(const Field& w) {
  const Grid& g = w.grid;
  const Quadrature q = quadrature(g);
  const ComplexArray dx = d_x1(w);
  const cplx c = w.boundary_value();
  double sum = 0.0;
  for (int i = 0; i < g.n1; ++i) {
    double row = 0.0;
    for (int k = 0; k < g.n2; ++k) {
      const std::size_t n = g.index(i, k);
      row += q.wr[k] * dot_i(dx[n], w.values[n] - c);
    }
    sum += q.wx[i] * row;
  }
  return sum;
}

FunctionalReport evaluate(const Field& w, const Nonlinearity& nl, double nu) {
  check_speed(nu);
  FunctionalReport r;
  r.nu = nu;
  r.dim = w.grid.dim;
  r.kinetic_x1 = kinetic_x1(w);
  r.t = kinetic_transverse(w);
  r.potential = potential(w, nl);
  r.p = momentum(w);
  const double vmod = potential_mod(w);
  r.e = r.kinetic_x1 + r.t + r.potential;
  r.e_mod = r.kinetic_x1 + r.t + vmod;
  r.j = -(r.kinetic_x1 + r.potential + nu * r.p);
  r.s = r.e + nu * r.p;
  const int n = r.dim;
  r.poh = static_cast<double>(n - 3) / (n - 1) * r.t - r.j;
  for (double x : {r.e, r.e_mod, r.p, r.t, r.j, r.s, r.poh})
    require_finite(x, "functional value");
  return r;
}

nlohmann::json to_json(const FunctionalReport& r) {
  return nlohmann::json{{"e", r.e},
                        {"e_mod", r.e_mod},
                        {"p", r.p},
                        {"t", r.t},
                        {"j", r.j},
                        {"s", r.s},
                        {"poh", r.poh},
                        {"nu", r.nu},
                        {"dim_N", r.dim},
                        {"kinetic_x1", r.kinetic_x1},
                        {"potential", r.potential}};
}

FunctionalReport report_from_json(const nlohmann::json& j) {
  FunctionalReport r;
  r.e = j.at("e").get<double>();
  r.e_mod = j.at("e_mod").get<double>();
  r.p = j.at("p").get<double>();
  r.t = j.at("t").get<double>();
  r.j = j.at("j").get<double>();
  r.s = j.at("s").get<double>();
  r.poh = j.at("poh").get<double>();
  r.nu = j.at("nu").get<double>();
  r.dim = j.at("dim_N").get<int>();
  r.kinetic_x1 = j.value("kinetic_x1", 0.0);
  r.potential = j.value("potential", 0.0);
  return r;
}

RealArray e_mod_density(const Field& w) {
  const Grid& g = w.grid;
  const Quadrature q = quadrature(g);
  RealArray d(g.size(), 0.0);
  for (int i = 0; i < g.n1; ++i)
    for (int k = 0; k < g.n2; ++k)
      d[g.index(i, k)] = q.weight(i, k) * half_vmod(std::abs(w.at(i, k)));
  const double ih1 = 1.0 / g.h1();
  for (int i = 0; i + 1 < g.n1; ++i) {
    for (int k = 0; k < g.n2; ++k) {
      const double e = 0.5 * q.wr[k] * std::norm(w.at(i + 1, k) - w.at(i, k)) * ih1;
      d[g.index(i, k)] += e;
      d[g.index(i + 1, k)] += e;
    }
  }
  const double ih2 = 1.0 / g.h2();
  for (int i = 0; i < g.n1; ++i) {
    for (int k = 0; k + 1 < g.n2; ++k) {
      const double e =
          0.5 * q.wx[i] * q.area[k] * std::norm(w.at(i, k + 1) - w.at(i, k)) * ih2;
      d[g.index(i, k)] += e;
      d[g.index(i, k + 1)] += e;
    }
  }
  return d;
}

double e_mod_local(const Field& w, const Box& box) {
  if (box.empty()) return 0.0;
  const Grid& g = w.grid;
  if (box.i0 < 0 || box.k0 < 0 || box.i1 >= g.n1 || box.k1 >= g.n2)
    throw ParameterError("e_mod_local: box outside the grid");
  const RealArray d = e_mod_density(w);
  double sum = 0.0;
  for (int i = box.i0; i <= box.i1; ++i)
    for (int k = box.k0; k <= box.k1; ++k) sum += d[g.index(i, k)];
  return sum;
}

ComplexArray grad_T(const Field& w) {
  ComplexArray out(w.grid.size(), 0.0);
  add_lap_perp(w, quadrature(w.grid), -2.0, out);
  return out;
}

ComplexArray grad_P(const Field& w) {
  ComplexArray out(w.grid.size(), 0.0);
  add_d1x(w, cplx(0.0, 2.0), out);
  return out;
}

ComplexArray grad_J(const Field& w, const Nonlinearity& nl, double nu) {
  ComplexArray out(w.grid.size(), 0.0);
  add_d2x(w, 2.0, out);
  add_nonlinear(w, nl, 2.0, out);
  add_d1x(w, cplx(0.0, -2.0 * nu), out);
  return out;
}

ComplexArray grad_E(const Field& w, const Nonlinearity& nl) {
  ComplexArray out(w.grid.size(), 0.0);
  add_d2x(w, -2.0, out);
  add_lap_perp(w, quadrature(w.grid), -2.0, out);
  add_nonlinear(w, nl, -2.0, out);
  return out;
}

ComplexArray grad_E_mod(const Field& w) {
  const Grid& g = w.grid;
  ComplexArray out(g.size(), 0.0);
  add_d2x(w, -2.0, out);
  add_lap_perp(w, quadrature(g), -2.0, out);
  for (int i = 1; i + 1 < g.n1; ++i) {
    for (int k = 0; k + 1 < g.n2; ++k) {
      const cplx u = w.at(i, k);
      const double a = std::abs(u);
      if (a == 0.0) continue;
      const double t = theta(a);
      out[g.index(i, k)] += 2.0 * (t * t - 1.0) * t * theta_prime(a) * (u / a);
    }
  }
  return out;
}

MomentumBound check_momentum_bound(const Field& w, double eps) {
  if (!(eps > 0.0 && eps < 1.0))
    throw ParameterError("check_momentum_bound: eps must lie in (0, 1)");
  MomentumBound b;
  for (const cplx& z : w.values)
    b.sup_deviation = std::max(b.sup_deviation, std::abs(std::abs(z) - 1.0));
  b.applicable = b.sup_deviation <= eps;
  if (!b.applicable) return b;
  const double e_mod = kinetic_x1(w) + kinetic_transverse(w) + potential_mod(w);
  b.lhs = std::abs(momentum(w));
  b.rhs = e_mod / (std::numbers::sqrt2 * (1.0 - eps));
  b.holds = b.lhs <= b.rhs;
  return b;
}

double pde_residual_scaled(const Field& w, const Nonlinearity& nl, double nu,
                           double transverse_scale) {
  const Grid& g = w.grid;
  const Quadrature q = quadrature(g);
  ComplexArray r(g.size(), 0.0);
  add_d2x(w, 1.0, r);
  add_lap_perp(w, q, transverse_scale, r);
  add_nonlinear(w, nl, 1.0, r);
  add_d1x(w, cplx(0.0, -nu), r);
  const double num = std::sqrt(std::max(0.0, inner(q, g, r, r)));
  const double den = std::sqrt(kinetic_x1(w) + kinetic_transverse(w));
  require_finite(num, "pde residual");
  return den > 0.0 ? num / den : num;
}

double pde_residual(const Field& w, const Nonlinearity& nl, double nu) {
  return pde_residual_scaled(w, nl, nu, 1.0);
}

}  // namespace nls
