#include "nls/checks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nls/ansatz.hpp"
#include "nls/errors.hpp"
#include "nls/functionals.hpp"
#include "nls/nonlinearity.hpp"

namespace nls {

namespace {

// Even-in-rho Gaussian sum times a window vanishing on the Dirichlet edges.
ComplexArray bump_sum(const Grid& g, std::mt19937_64& rng, int bumps, bool complex_amp) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  struct Bump {
    double a, b, s;
    cplx c;
  };
  std::vector<Bump> bs;
  for (int m = 0; m < bumps; ++m) {
    Bump b;
    b.a = (2.0 * u(rng) - 1.0) * 0.5 * g.L1;
    b.b = u(rng) * 0.5 * g.L2;
    b.s = (0.1 + 0.2 * u(rng)) * std::min(g.L1, g.L2);
    b.c = complex_amp ? cplx(2.0 * u(rng) - 1.0, 2.0 * u(rng) - 1.0) : cplx(2.0 * u(rng) - 1.0);
    bs.push_back(b);
  }
  ComplexArray out(g.size(), 0.0);
  for (int i = 0; i < g.n1; ++i)
    for (int k = 0; k < g.n2; ++k) {
      if (g.is_boundary(i, k)) continue;
      const double x = g.x1(i), r = g.rho(k);
      const double win = (1.0 - (x / g.L1) * (x / g.L1)) * (1.0 - (r / g.L2) * (r / g.L2));
      cplx acc = 0.0;
      for (const auto& b : bs) {
        const double gx = std::exp(-(x - b.a) * (x - b.a) / (b.s * b.s));
        const double gr = std::exp(-(r - b.b) * (r - b.b) / (b.s * b.s)) +
                          std::exp(-(r + b.b) * (r + b.b) / (b.s * b.s));
        acc += b.c * gx * gr;
      }
      out[g.index(i, k)] = win * acc;
    }
  return out;
}

double max_abs(const ComplexArray& a) {
  double m = 0.0;
  for (const auto& z : a) m = std::max(m, std::abs(z));
  return m;
}

CertifyCheck make_check(std::string name, bool pass, double residual, double tol,
                        std::string detail) {
  CertifyCheck c;
  c.name = std::move(name);
  c.pass = pass;
  c.residual = residual;
  c.tolerance = tol;
  c.detail = std::move(detail);
  return c;
}

double rel(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s > 0.0 ? std::abs(a - b) / s : 0.0;
}

}  // namespace

Field random_smooth_field(const Grid& grid, std::mt19937_64& rng, double amplitude, int bumps) {
  ComplexArray s = bump_sum(grid, rng, bumps, true);
  const double m = max_abs(s);
  Field w = Field::constant(grid);
  for (std::size_t n = 0; n < s.size(); ++n)
    w.values[n] += m > 0.0 ? amplitude / m * s[n] : 0.0;
  w.apply_boundary();
  return w;
}

ComplexArray random_perturbation(const Grid& grid, std::mt19937_64& rng, int bumps) {
  ComplexArray s = bump_sum(grid, rng, bumps, true);
  const double m = max_abs(s);
  if (m > 0.0)
    for (auto& z : s) z /= m;
  return s;
}

Field random_modulus_field(const Grid& grid, std::mt19937_64& rng, double max_dev) {
  ComplexArray a = bump_sum(grid, rng, 3, false);
  ComplexArray th = bump_sum(grid, rng, 3, false);
  const double ma = max_abs(a), mt = max_abs(th);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  const double phase_amp = u(rng);
  Field w = Field::constant(grid);
  for (std::size_t n = 0; n < a.size(); ++n) {
    const double dev = ma > 0.0 ? max_dev * a[n].real() / ma : 0.0;
    const double ph = mt > 0.0 ? phase_amp * th[n].real() / mt : 0.0;
    w.values[n] = (1.0 + dev) * std::polar(1.0, ph);
  }
  w.apply_boundary();
  return w;
}

double fd_gradient_mismatch(double f_plus, double f_minus, double t, double directional) {
  const double fd = (f_plus - f_minus) / (2.0 * t);
  return rel(fd, directional);
}

CertifyReport run_invariant_suites(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  CertifyReport out;
  const Nonlinearity gp = make_gp();

  {
    const Grid g = Grid::make(3, 1.0, 1.0, 41, 41);
    const RealArray one(g.size(), 1.0);
    const double exact = 2.0 * std::numbers::pi * 2.0 * 1.0 * 1.0 / 2.0;
    const double r = rel(integrate(g, one), exact);
    out.checks.push_back(make_check("quadrature", r <= 1e-10, r, 1e-10, "integral of 1, N=3"));
  }
  {
    bool ok = std::abs(theta(1.0) - 1.0) < 1e-15 && theta(6.0) == 3.0 && theta(-6.0) == -3.0;
    double prev = theta(0.0);
    for (int n = 1; n <= 10000 && ok; ++n) {
      const double x = 5.0 * n / 10000.0;
      const double tp = theta_prime(x);
      ok = tp >= 0.0 && tp <= 1.0 && theta(x) >= prev && std::abs(theta(-x) + theta(x)) == 0.0;
      prev = theta(x);
    }
    out.checks.push_back(make_check("theta", ok, 0.0, 0.0, "pinned values, oddness, 0 <= Theta' <= 1"));
  }
  {
    const auto a = check_assumptions(gp, 4);
    const auto b = check_assumptions(make_cubic_quintic(1.0), 4);
    const auto c = check_assumptions(make_polynomial("broken", {1.0, 0.0, -1.0}), 4);
    const bool ok = a.ass1() && a.ass3() && b.ass1() && !c.ass1();
    out.checks.push_back(make_check("assumptions", ok, 0.0, 0.0,
                                    "gp and cubic-quintic pass Ass1, 1 - s^2 fails"));
  }
  {
    double worst = 0.0;
    for (int dim : {3, 4, 5}) {
      const Grid g = Grid::make(dim, 8.0, 8.0, 49, 33);
      for (int m = 0; m < 3; ++m) {
        const Field w = random_smooth_field(g, rng, 0.5);
        const FunctionalReport r = evaluate(w, gp, 0.5);
        worst = std::max({worst, std::abs(r.s - (r.t - r.j)),
                          std::abs(r.poh - ((dim - 3.0) / (dim - 1.0) * r.t - r.j))});
      }
    }
    out.checks.push_back(make_check("report_identities", worst <= 1e-10, worst, 1e-10,
                                    "S = T - J and Poh formula"));
  }
  {
    const Grid g = Grid::make(3, 8.0, 8.0, 49, 33);
    const Field w = random_smooth_field(g, rng, 0.5);
    Field v = w;
    const double alpha = 0.7;
    for (auto& z : v.values) z *= std::polar(1.0, alpha);
    v.boundary_phase = alpha;
    const double r = std::abs(momentum(v) - momentum(w));
    out.checks.push_back(make_check("gauge", r <= 1e-12 * std::max(1.0, std::abs(momentum(w))),
                                    r, 1e-12, "P(e^{ia} w) = P(w)"));
  }
  {
    const Grid g = Grid::make(4, 8.0, 8.0, 49, 33);
    const Field w = random_smooth_field(g, rng, 0.8);
    const double whole = e_mod_local(w, Box::whole(g));
    const double parts = e_mod_local(w, Box{0, 20, 0, g.n2 - 1}) +
                         e_mod_local(w, Box{21, g.n1 - 1, 0, 10}) +
                         e_mod_local(w, Box{21, g.n1 - 1, 11, g.n2 - 1});
    const double r = rel(whole, parts);
    const double r2 = rel(whole, evaluate(w, gp, 0.0).e_mod);
    out.checks.push_back(make_check("e_mod_additivity", r <= 1e-12 && r2 <= 1e-12,
                                    std::max(r, r2), 1e-12, "three boxes and whole grid"));
  }
  {
    double worst = 0.0;
    for (int dim : {3, 4, 5}) {
      const Grid g = Grid::make(dim, 8.0, 8.0, 49, 33);
      const Field w = random_smooth_field(g, rng, 0.6);
      const FunctionalReport r0 = evaluate(w, gp, 0.5);
      for (double s : {0.5, 2.0}) {
        const FunctionalReport r1 = evaluate(dilate(w, {1.0, s}), gp, 0.5);
        worst = std::max({worst, rel(r1.t, std::pow(s, dim - 3) * r0.t),
                          rel(r1.j, std::pow(s, dim - 1) * r0.j)});
      }
    }
    out.checks.push_back(make_check("scaling", worst <= 1e-12, worst, 1e-12,
                                    "T and J under transverse dilation, N = 3, 4, 5"));
  }
  {
    double worst = 0.0;
    const double t = 1e-5;
    for (int dim : {3, 4}) {
      const Grid g = Grid::make(dim, 6.0, 6.0, 41, 31);
      const Quadrature q = quadrature(g);
      for (int m = 0; m < 10; ++m) {
        const Field w = random_smooth_field(g, rng, 0.7);
        const ComplexArray v = random_perturbation(g, rng);
        Field wp = w, wm = w;
        for (std::size_t n = 0; n < v.size(); ++n) {
          wp.values[n] += t * v[n];
          wm.values[n] -= t * v[n];
        }
        worst = std::max(worst, fd_gradient_mismatch(kinetic_transverse(wp),
                                                     kinetic_transverse(wm), t,
                                                     inner(q, g, grad_T(w), v)));
        worst = std::max(worst, fd_gradient_mismatch(evaluate(wp, gp, 0.5).j,
                                                     evaluate(wm, gp, 0.5).j, t,
                                                     inner(q, g, grad_J(w, gp, 0.5), v)));
      }
    }
    out.checks.push_back(make_check("gradients", worst <= 1e-4, worst, 1e-4,
                                    "grad T, grad J vs central differences"));
  }
  {
    const Grid g = Grid::make(3, 8.0, 8.0, 49, 33);
    int held = 0, applicable = 0;
    double worst = 0.0;
    for (int m = 0; m < 100; ++m) {
      const Field w = random_modulus_field(g, rng, 0.199);
      const MomentumBound b = check_momentum_bound(w, 0.2);
      applicable += b.applicable;
      held += b.applicable && b.holds;
      if (b.rhs > 0.0) worst = std::max(worst, b.lhs / b.rhs);
    }
    std::ostringstream os;
    os << held << " of 100 hold (" << applicable << " applicable), max |P|/bound " << worst;
    out.checks.push_back(make_check("momentum_bound", held == 100, worst, 1.0, os.str()));
  }
  {
    const Grid g = Grid::make(4, 20.0, 20.0, 128, 96);
    const Field w = make_vortex_ring(g, 12.0);
    const FunctionalReport r = evaluate(w, gp, 0.5);
    bool ok = false;
    double res = 0.0;
    if (r.j > 0.0) {
      const auto [u, lam] = pohozaev_normalize(w, gp, 0.5);
      const FunctionalReport ru = evaluate(u, gp, 0.5);
      res = std::max(std::abs(ru.poh) / ru.t, rel(ru.s, 2.0 / 3.0 * ru.t));
      ok = res <= 1e-10;
    }
    out.checks.push_back(make_check("pohozaev_normalize", ok, res, 1e-10,
                                    "Poh = 0 and S = 2T/(N-1) after normalization"));
  }
  return out;
}

}  // namespace nls
