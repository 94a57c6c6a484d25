#pragma once

// Constrained minimization of the traveling-wave functionals.
//
// Mode A minimizes T on {J = j} (N >= 4) at a prescribed speed; feasibility is
// restored exactly by transverse dilation. The minimizer solves the
// transversally rescaled equation, and the dilation by lambda0 = sqrt(lambda)
// turns it into a traveling wave.
//
// Mode B minimizes E on {P = q}; feasibility is restored by solving the exact
// quadratic P(w + s v) = q along v = M^{-1} grad P. The multiplier of
// E + nu (P - q) is the speed nu.
//
// Both modes use the same projected descent: the preconditioned objective
// gradient with its component along the preconditioned constraint gradient
// removed, so the direction is orthogonal to the constraint gradient in the
// quadrature inner product, followed by backtracking on the restored merit.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nls/functionals.hpp"
#include "nls/grid.hpp"
#include "nls/nonlinearity.hpp"

namespace nls {

enum class Mode { kA, kB };

struct MinimizeConfig {
  Mode mode = Mode::kA;
  double constraint_value = 1.0;  // j > 0 (A) or q < 0 (B)
  double nu = 0.5;                // mode A only
  int max_iters = 20000;
  double step = 1.0;              // initial step
  double tol_grad = 1e-4;         // normalized residual of the rescaled equation
  double tol_constraint = 1e-8;   // relative drift allowed between restorations
  int restore_every = 1;
  int check_every = 10;           // cadence of the convergence test
  double time_limit_s = 0.0;      // wall-clock cap, 0 = none
  bool keep_trace = true;
};

void validate(const MinimizeConfig& cfg, int dim);

struct TraceEntry {
  int iter = 0;
  double merit = 0.0;       // restored T (A) or E (B)
  double constraint = 0.0;  // J (A) or P (B) before restoration
  double step = 0.0;
  double residual = 0.0;    // normalized residual, or -1 if not evaluated
  double multiplier = 0.0;
};

struct SolitonRecord {
  Field field;                 // rescaled solution
  double nu = 0.0;
  std::string family;          // "J", "Q" or "P-normalized"
  double lambda0 = 1.0;
  double multiplier = 0.0;     // lambda (A) or nu (B)
  double constraint_value = 0.0;
  double objective = 0.0;      // T at J = j (A) or E at P = q (B), before rescaling
  FunctionalReport report;
  double residual_pde = 0.0;
  double residual_poh = 0.0;   // |Poh| of the returned field
  int iterations = 0;
  bool converged = false;
  std::string status;          // "converged" or the reason for failure
  std::vector<TraceEntry> trace;
};

// Field values are stored separately (see io.hpp).
nlohmann::json record_to_json(const SolitonRecord& r);
SolitonRecord record_from_json(const nlohmann::json& j);

// Both throw ParameterError/DomainError on violated preconditions. A run that
// fails to converge returns a record with converged = false.
SolitonRecord minimize_T_fixed_J(const Field& w0, const MinimizeConfig& cfg,
                                 const Nonlinearity& nl);
SolitonRecord minimize_E_fixed_P(const Field& w0, const MinimizeConfig& cfg,
                                 const Nonlinearity& nl);

// Initial field for mode B: w_r with P(w_r) closest to q, corrected onto
// {P = q} along M^{-1} grad P.
Field prepare_initial_momentum(const Grid& grid, double q);

// Restores P(w) = q along v. Returns false when the quadratic has no real root.
bool restore_momentum(Field& w, const ComplexArray& v, double q);

struct CertifyCheck {
  std::string name;
  bool applicable = true;
  bool pass = false;
  double residual = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct CertifyReport {
  std::vector<CertifyCheck> checks;
  bool pass() const;  // all applicable checks pass
  const CertifyCheck& find(const std::string& name) const;
};

nlohmann::json to_json(const CertifyReport& r);

// Recomputes the identities on the record's field:
//   pohozaev     |Poh| <= 1e-2 T
//   pohozaev2    (N-2) int|grad w|^2 + N int V + (N-1) nu P = 0 within 1e-2 of
//                the largest term
//   integral_v   int V = -nu P/2 - (N-2) J/(N-3) within 2% (N >= 4)
//   integral_kx  int |w_x1|^2 = -nu P/2 + J/(N-3) within 2% (N >= 4)
//   least_action S <= S(candidate) (1 + 1e-2) for a Pohozaev-normalized
//                vortex-ring candidate (mode A records)
CertifyReport certify(const SolitonRecord& record, const Nonlinearity& nl);

}  // namespace nls
