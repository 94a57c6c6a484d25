#pragma once

// Randomized invariant suites behind `check --all`, and the seeded field
// generators they share with the tests.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "nls/grid.hpp"
#include "nls/minimizer.hpp"

namespace nls {

// 1 + sum of `bumps` complex Gaussians with random centres and widths inside
// the box, windowed to vanish on the Dirichlet edges; |w - 1| <= amplitude.
Field random_smooth_field(const Grid& grid, std::mt19937_64& rng, double amplitude,
                          int bumps = 4);

// Perturbation with the same construction minus the constant, zero on the
// Dirichlet nodes.
ComplexArray random_perturbation(const Grid& grid, std::mt19937_64& rng, int bumps = 4);

// (1 + a) exp(i theta) with smooth a, theta vanishing at the edges and
// max |a| = max_dev. Hence || |w| - 1 ||_inf = max_dev.
Field random_modulus_field(const Grid& grid, std::mt19937_64& rng, double max_dev);

// Relative central-difference mismatch |fd - <grad, v>| / max(|fd|, |<grad, v>|).
double fd_gradient_mismatch(double f_plus, double f_minus, double t, double directional);

// Runs every suite: quadrature, theta, assumptions, functional identities,
// gauge, e_mod additivity, scaling laws, gradients, momentum bound,
// pohozaev normalization.
CertifyReport run_invariant_suites(std::uint64_t seed);

}  // namespace nls
