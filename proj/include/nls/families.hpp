#pragma once

// Parameter sweeps over the two constrained problems and the relations
// between the resulting soliton families.
//
// Mode A sweeps give T_min(j); with the exact discrete scaling the curve is a
// power law j^{(N-3)/(N-1)} and
//
//   S0 = sup_j (T_min(j) - j),   j* = (N-3) S0 / 2,   lambda0(j*) = 1,
//   T_min(1) = C0 S0^{2/(N-1)},
//
// while every rescaled minimizer has action S0. Mode B sweeps trace the
// energy-momentum branch.

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nls/grid.hpp"
#include "nls/minimizer.hpp"
#include "nls/nonlinearity.hpp"

namespace nls {

struct PowerFit {
  double coeff = 0.0;     // A in y = A x^p
  double exponent = 0.0;  // p
  int points = 0;
};

// Least squares on (log x, log y). Throws ParameterError on fewer than two
// points or non-positive data.
PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

// C0 = (1/2)^{2/(N-1)} (N-1) / (N-3)^{(N-3)/(N-1)}; N >= 4.
double c0_constant(int dim);

// Summary of one solve, enough for the family relations.
struct FamilyPoint {
  double axis = 0.0;       // j (mode A) or q (mode B)
  bool converged = false;
  std::string status;
  double objective = 0.0;  // T at J = j, or E at P = q
  double lambda0 = 1.0;
  double multiplier = 0.0;
  double nu = 0.0;
  // Functionals of the returned field (rescaled in mode A).
  double e = 0.0, p = 0.0, t = 0.0, j = 0.0, s = 0.0, poh = 0.0;
  double residual_pde = 0.0;
};

FamilyPoint summarize(double axis, const SolitonRecord& r);

struct SweepResult {
  Mode mode = Mode::kA;
  int dim = 4;
  double nu = 0.0;                      // mode A speed
  std::vector<double> axis;             // ascending
  std::vector<SolitonRecord> records;   // aligned with axis
  std::vector<FamilyPoint> points;      // aligned with axis
  PowerFit t_min_fit;                   // mode A, over converged points
  double s0_estimate = 0.0;             // sup of the fitted T_min(j) - j
  double j_star = 0.0;                  // its argmax
  double s0_pohozaev = 0.0;             // mean 2 T / (N-1) of rescaled minimizers
  std::vector<std::string> flags;       // excluded or suspicious points
};

nlohmann::json to_json(const SweepResult& s);  // without field data

struct SweepOptions {
  Grid grid;                 // grid of each solve (before seed dilation)
  MinimizeConfig base;       // mode, tolerances and limits; the axis value
                             // overrides constraint_value
  int threads = 0;           // 0: NLS_SOLITON_THREADS or hardware concurrency
  std::filesystem::path dir; // empty: no persistence
  bool resume = true;        // reuse matching records found in dir
};

// Worker count: NLS_SOLITON_THREADS when set and positive, else `requested`
// when positive, else the hardware concurrency.
int worker_count(int requested);

// Mode A solves at each j from prepare_initial. Requires N >= 4 and j > 0.
// Unconverged solves are kept, flagged and excluded from the fit. The fit
// needs at least four converged points; otherwise the estimates stay 0 and a
// flag is added.
SweepResult sweep_Tmin(const std::vector<double>& j_values, double nu,
                       const Nonlinearity& nl, const SweepOptions& opts);

// Mode B solves at each q < 0 from prepare_initial_momentum.
SweepResult ep_curve(const std::vector<double>& q_values, const Nonlinearity& nl,
                     const SweepOptions& opts);

// S0 and j* from a fitted T_min = A j^p: maximizes A j^p - j on a log grid
// and polishes the maximizer. Requires 0 < p < 1.
std::pair<double, double> s0_from_fit(const PowerFit& fit);

// Family relations of a mode A sweep, each within `tol` (relative):
//   power_law      exponent = (N-3)/(N-1)
//   subadditivity  T_min(a + b) < T_min(a) + T_min(b) on recorded triples
//   j_star         j* = (N-3) S0 / 2
//   s0_sup         S0 = T_min(j*) - j*, T_min(j*) scaled from the nearest record
//   c0             T_min(1) = C0 S0^{2/(N-1)}
//   lambda0        lambda0(j*) = 1, scaled from each record
//   action         S of each rescaled record = S0
//   s0_pohozaev    the two S0 estimates agree
//   sobolev        T >= C0 S0^{2/(N-1)} J^{(N-3)/(N-1)} (1 - tol) per record
CertifyReport verify_family_identities(const SweepResult& sweep, double tol = 0.05);

// Energy-momentum branch of a mode B sweep:
//   speeds         every converged nu in (0, sqrt(2))
//   inf_energy     min E > 0
//   inf_momentum   min |P| > 0
//   action         S >= -0.01 E per point
//   monotone       E increases with |P|
// Unconverged points fail `converged`.
CertifyReport verify_energy_momentum(const SweepResult& sweep);

// Columns axis, E, P, T, J, S, Poh, nu, lambda0, residual_pde, residual_poh,
// converged.
void write_curve_csv(const std::filesystem::path& path, const SweepResult& s);

}  // namespace nls
