#pragma once

// Constructive test fields: anisotropic dilations, the ring-shaped phase
// field w_r, a smooth vortex-ring seed, and initializers that land exactly
// on a constraint set {J = j}.

#include <string>
#include <utility>
#include <vector>

#include "nls/grid.hpp"
#include "nls/nonlinearity.hpp"

namespace nls {

struct DilationParams {
  double lambda1 = 1.0;  // x1 stretch
  double lambda2 = 1.0;  // transverse stretch
};

// w(x1/lambda1, rho/lambda2): rescales the grid extents, keeps the node
// values. All functional scaling laws therefore hold to rounding error.
Field dilate(const Field& w, DilationParams d);

// Cutoff used by w_r: 0 for x <= 1, 1 for x >= 2, derivative in [0, 2].
double ring_cutoff(double x);

// w_r = chi_r exp(i phi_r), with the piecewise phase that winds by 2 pi
// across the cone |x1| < r - rho inside the ring and the cutoff
// chi_r = ring_cutoff(dist((x1, rho), (0, r))). Requires r >= 2 and
// L1, L2 >= r + 4.
Field make_wr(const Grid& grid, double r);

// Phase of the potential flow around a vortex ring of radius R in R^N: minus
// 2 pi times the normalized double-layer potential of the flat disc
// {x1 = 0, |x_perp| < R}. Winds by +2 pi along x1 through the disc and decays
// like |x|^{1-N}.
double ring_flow_phase(int dim, double R, double x1, double rho);

// Smooth vortex-ring seed of radius R: core profiles d / sqrt(d^2 + 2) at
// (0, +-R) times exp(i ring_flow_phase), windowed to reach the boundary value
// 1. Requires R >= 1 and L1, L2 >= R + 4.
Field make_vortex_ring(const Grid& grid, double R);

enum class SeedKind { kPhaseRing, kVortexRing };

struct SeedSample {
  SeedKind kind;
  double radius;
  double j;
};

struct PreparedSeed {
  Field field;
  SeedKind kind = SeedKind::kPhaseRing;
  double radius = 0.0;  // r of w_r, or R of the vortex ring
  double j1 = 0.0;      // J of the undilated seed
  double sigma = 1.0;   // transverse dilation applied
  std::vector<SeedSample> samples;  // every seed tried, in order
};

struct PrepareOptions {
  // Fall back to vortex-ring seeds when no w_r on the grid has J > 0.
  bool allow_vortex_ring = true;
};

// Field with J = j (to rounding) on `grid` rescaled transversally.
// Throws NumericError with the sampled J values when no seed has J > 0.
PreparedSeed prepare_initial(const Grid& grid, double j, const Nonlinearity& nl,
                             double nu, PrepareOptions opts = {});

// (w_{1, lambda_w}, lambda_w) with lambda_w = sqrt((N-3) T / ((N-1) J)), the
// unique transverse dilation with Poh = 0. Throws DomainError when J <= 0,
// T == 0 or N < 4.
std::pair<Field, double> pohozaev_normalize(const Field& w, const Nonlinearity& nl,
                                            double nu);

}  // namespace nls
