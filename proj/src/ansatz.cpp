#include "nls/ansatz.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/ellint_2.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "nls/errors.hpp"
#include "nls/functionals.hpp"

namespace nls {

namespace {

constexpr double kPi = std::numbers::pi;

void require_room(const Grid& g, double radius, const char* who) {
  if (g.L1 < radius + 4.0 || g.L2 < radius + 4.0) {
    std::ostringstream os;
    os << who << ": domain too small for radius " << radius << " (need L1, L2 >= "
       << radius + 4.0 << ")";
    throw ParameterError(os.str());
  }
}

double ring_phase(double x1, double rho, double r) {
  if (rho >= r) return 0.0;
  const double a = r - rho;
  if (x1 <= -a) return 0.0;
  if (x1 >= a) return 2.0 * kPi;
  return kPi * (x1 / a + 1.0);
}

// Vortex core profile with unit healing length.
double core(double d) { return d / std::sqrt(d * d + 2.0); }

// Surface area of the unit sphere S^{m-1} in R^m.
double sphere_area(int m) {
  return 2.0 * std::pow(kPi, 0.5 * m) / std::tgamma(0.5 * m);
}

}  // namespace

Field dilate(const Field& w, DilationParams d) {
  if (!(d.lambda1 > 0.0) || !(d.lambda2 > 0.0) || !std::isfinite(d.lambda1) ||
      !std::isfinite(d.lambda2))
    throw ParameterError("dilate: factors must be positive and finite");
  Field out = w;
  out.grid.L1 = w.grid.L1 * d.lambda1;
  out.grid.L2 = w.grid.L2 * d.lambda2;
  return out;
}

double ring_cutoff(double x) { return smooth_step(x - 1.0); }

Field make_wr(const Grid& grid, double r) {
  if (!(r >= 2.0) || !std::isfinite(r)) throw ParameterError("make_wr: r must be >= 2");
  require_room(grid, r, "make_wr");
  Field w = Field::constant(grid, 0.0);
  for (int i = 0; i < grid.n1; ++i) {
    const double x1 = grid.x1(i);
    for (int k = 0; k < grid.n2; ++k) {
      const double rho = grid.rho(k);
      const double chi = ring_cutoff(std::hypot(x1, rho - r));
      w.at(i, k) = std::polar(chi, ring_phase(x1, rho, r));
    }
  }
  w.apply_boundary();
  return w;
}

namespace {

// Integral of |x - y|^{-N} over the sphere {|y_perp| = s} in R^{N-1}, with
// a = x1^2 + rho^2 + s^2 and b = 2 rho s. Closed forms for N = 3, 4.
double shell_kernel(int dim, double a, double b) {
  if (dim == 3) {
    if (b == 0.0) return 2.0 * kPi * std::pow(a, -1.5);
    const double k = std::sqrt(2.0 * b / (a + b));
    return 4.0 * boost::math::ellint_2(k) / ((a - b) * std::sqrt(a + b));
  }
  if (dim == 4) return 4.0 * kPi / ((a - b) * (a + b));
  using boost::math::quadrature::gauss;
  const double half_n = 0.5 * dim;
  return sphere_area(dim - 2) *
         gauss<double, 30>::integrate(
             [&](double t) {
               return std::pow(std::sin(t), dim - 3) * std::pow(a - b * std::cos(t), -half_n);
             },
             0.0, kPi);
}

}  // namespace

double ring_flow_phase(int dim, double R, double x1, double rho) {
  if (x1 == 0.0) return 0.0;
  using boost::math::quadrature::gauss;
  const double a0 = x1 * x1 + rho * rho;
  auto radial = [&](double s) {
    return std::pow(s, dim - 2) * shell_kernel(dim, a0 + s * s, 2.0 * rho * s);
  };
  const double c = 2.0 * kPi / sphere_area(dim);
  if (rho < R) {
    // Inside the disc cylinder: subtract the full half-space Poisson integral,
    // which equals pi sign(x1), and integrate the complement s > R via s = R/u.
    const double rest = gauss<double, 40>::integrate(
        [&](double u) { return radial(R / u) * R / (u * u); }, 0.0, 1.0);
    return -std::copysign(kPi, x1) + c * x1 * rest;
  }
  return -c * x1 * gauss<double, 40>::integrate(radial, 0.0, R);
}

Field make_vortex_ring(const Grid& grid, double R) {
  if (!(R >= 1.0) || !std::isfinite(R))
    throw ParameterError("make_vortex_ring: R must be >= 1");
  require_room(grid, R, "make_vortex_ring");
  Field w = Field::constant(grid, 0.0);
  // The phase jumps by 2 pi only across the disc {x1 = 0, rho < R}, where the
  // window equals 1; beyond it the window removes the algebraic tail.
  const double inner_r = R + 2.0;
  const double outer_r = std::min(grid.L1, grid.L2) - 0.5;
  for (int i = 0; i < grid.n1; ++i) {
    const double x1 = grid.x1(i);
    for (int k = 0; k < grid.n2; ++k) {
      const double rho = grid.rho(k);
      const double dist = std::hypot(x1, rho);
      const double window =
          1.0 - smooth_step((dist - inner_r) / std::max(outer_r - inner_r, 1.0));
      const double phase = window > 0.0 ? ring_flow_phase(grid.dim, R, x1, rho) : 0.0;
      const double mod = core(std::hypot(x1, rho - R)) * core(std::hypot(x1, rho + R));
      w.at(i, k) = std::polar(mod, window * phase);
    }
  }
  w.apply_boundary();
  return w;
}

PreparedSeed prepare_initial(const Grid& grid, double j, const Nonlinearity& nl,
                             double nu, PrepareOptions opts) {
  if (grid.dim < 4) throw DomainError("mode A requires N ≥ 4");
  check_speed(nu);
  if (!(j > 0.0) || !std::isfinite(j)) throw ParameterError("prepare_initial: j must be > 0");

  PreparedSeed seed;
  auto finish = [&](Field w, SeedKind kind, double radius, double j1) {
    seed.kind = kind;
    seed.radius = radius;
    seed.j1 = j1;
    seed.sigma = std::pow(j / j1, 1.0 / (grid.dim - 1));
    seed.field = dilate(w, {1.0, seed.sigma});
    return seed;
  };

  for (double r = 4.0; r + 4.0 <= std::min(grid.L1, grid.L2); r += 2.0) {
    Field w = make_wr(grid, r);
    const double jr = evaluate(w, nl, nu).j;
    seed.samples.push_back({SeedKind::kPhaseRing, r, jr});
    if (jr > 0.0) return finish(std::move(w), SeedKind::kPhaseRing, r, jr);
  }

  if (opts.allow_vortex_ring) {
    // Among rings with J > 0 keep the one with the smallest scale-invariant
    // ratio T^{(N-1)/(N-3)} / J, the quantity the constrained minimum reaches.
    const double expo = static_cast<double>(grid.dim - 1) / (grid.dim - 3);
    double best_ratio = std::numeric_limits<double>::infinity();
    double best_r = 0.0, best_j = 0.0;
    for (double R = 2.0; R + 4.0 <= std::min(grid.L1, grid.L2); R += 1.0) {
      const Field w = make_vortex_ring(grid, R);
      const FunctionalReport rep = evaluate(w, nl, nu);
      seed.samples.push_back({SeedKind::kVortexRing, R, rep.j});
      if (rep.j <= 0.0) continue;
      const double ratio = std::pow(rep.t, expo) / rep.j;
      if (ratio < best_ratio) {
        best_ratio = ratio;
        best_r = R;
        best_j = rep.j;
      }
    }
    if (best_r > 0.0)
      return finish(make_vortex_ring(grid, best_r), SeedKind::kVortexRing, best_r, best_j);
  }

  std::ostringstream os;
  os << "prepare_initial: no seed with J > 0 on this grid; sampled (radius, J):";
  for (const auto& s : seed.samples) os << " (" << s.radius << ", " << s.j << ")";
  throw NumericError(os.str());
}

std::pair<Field, double> pohozaev_normalize(const Field& w, const Nonlinearity& nl,
                                            double nu) {
  const int n = w.grid.dim;
  if (n < 4) throw DomainError("pohozaev_normalize: requires N >= 4");
  const FunctionalReport rep = evaluate(w, nl, nu);
  if (!(rep.j > 0.0)) throw DomainError("pohozaev_normalize: requires J > 0");
  if (!(rep.t > 0.0)) throw DomainError("pohozaev_normalize: requires T > 0");
  const double lambda = std::sqrt((n - 3) * rep.t / ((n - 1) * rep.j));
  return {dilate(w, {1.0, lambda}), lambda};
}

}  // namespace nls
