// Command-line front end. Exit codes: 0 certified success, 1 numeric failure,
// 2 usage error.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "nls/ansatz.hpp"
#include "nls/checks.hpp"
#include "nls/errors.hpp"
#include "nls/families.hpp"
#include "nls/functionals.hpp"
#include "nls/io.hpp"
#include "nls/minimizer.hpp"
#include "nls/regularize.hpp"

namespace fs = std::filesystem;
using namespace nls;

namespace {

constexpr int kOk = 0;
constexpr int kNumeric = 1;
constexpr int kUsage = 2;

struct Common {
  int dim = 3;
  std::string nonlinearity = "gp";
  double c1 = 1.0;
  int n1 = 256, n2 = 128;
  double L1 = 20.0, L2 = 20.0;
  std::string output = "out";
  std::uint64_t seed = 1;
  int threads = 0;
  // Minimizer controls.
  int max_iters = 20000;
  double step = 1.0;
  double tol_grad = 1e-4;
  double tol_constraint = 1e-8;
  int restore_every = 1;
  int check_every = 10;
  double time_limit = 0.0;
};

Nonlinearity make_nonlinearity(const Common& c) {
  if (c.nonlinearity == "gp") return make_gp();
  if (c.nonlinearity == "cubic-quintic") return make_cubic_quintic(c.c1);
  throw ParameterError("unknown nonlinearity '" + c.nonlinearity +
                       "' (expected gp or cubic-quintic)");
}

Grid make_grid(const Common& c) { return Grid::make(c.dim, c.L1, c.L2, c.n1, c.n2); }

MinimizeConfig make_config(const Common& c, Mode mode) {
  MinimizeConfig cfg;
  cfg.mode = mode;
  cfg.max_iters = c.max_iters;
  cfg.step = c.step;
  cfg.tol_grad = c.tol_grad;
  cfg.tol_constraint = c.tol_constraint;
  cfg.restore_every = c.restore_every;
  cfg.check_every = c.check_every;
  cfg.time_limit_s = c.time_limit;
  return cfg;
}

Mode parse_mode(const std::string& m) {
  if (m == "A" || m == "a") return Mode::kA;
  if (m == "B" || m == "b") return Mode::kB;
  throw ParameterError("mode must be A or B");
}

fs::path out_dir(const Common& c) {
  fs::create_directories(c.output);
  return c.output;
}

void print_report(const CertifyReport& r) {
  for (const auto& c : r.checks) {
    const char* tag = !c.applicable ? "SKIP" : c.pass ? "PASS" : "FAIL";
    std::cout << tag << "  " << c.name << "  " << c.detail << '\n';
  }
}

int run_solve(const Common& c, const std::string& mode_s, double j, double q, double nu,
              const std::string& init) {
  const Mode mode = parse_mode(mode_s);
  const Nonlinearity nl = make_nonlinearity(c);
  MinimizeConfig cfg = make_config(c, mode);
  cfg.nu = nu;
  cfg.constraint_value = mode == Mode::kA ? j : q;
  validate(cfg, c.dim);
  if (mode == Mode::kA) check_speed(nu);

  SolitonRecord rec;
  if (mode == Mode::kA) {
    const Field w0 = init.empty() ? prepare_initial(make_grid(c), j, nl, nu).field
                                  : load_field(init);
    rec = minimize_T_fixed_J(w0, cfg, nl);
  } else {
    const Field w0 = init.empty() ? prepare_initial_momentum(make_grid(c), q) : load_field(init);
    rec = minimize_E_fixed_P(w0, cfg, nl);
  }
  const CertifyReport cert = certify(rec, nl);
  const fs::path dir = out_dir(c);
  save_record(dir / "record", rec);
  write_json(dir / "certify.json", to_json(cert));

  std::cout << "status " << rec.status << ", iterations " << rec.iterations << ", nu " << rec.nu
            << ", multiplier " << rec.multiplier << ", lambda0 " << rec.lambda0
            << ", residual_pde " << rec.residual_pde << ", |Poh| " << rec.residual_poh << '\n';
  print_report(cert);
  return rec.converged && cert.pass() ? kOk : kNumeric;
}

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw ParameterError(std::string("bad number in ") + what + ": " + tok);
    out.push_back(v);
  }
  if (out.empty()) throw ParameterError(std::string(what) + " list is empty");
  return out;
}

SweepOptions sweep_options(const Common& c, Mode mode, bool resume) {
  SweepOptions o;
  o.grid = make_grid(c);
  o.base = make_config(c, mode);
  o.base.keep_trace = false;
  o.threads = c.threads;
  o.dir = out_dir(c);
  o.resume = resume;
  return o;
}

int finish_sweep(const Common& c, const SweepResult& s, const CertifyReport& v) {
  const fs::path dir = out_dir(c);
  write_curve_csv(dir / "curve.csv", s);
  nlohmann::json j = to_json(s);
  j["verify"] = to_json(v);
  write_json(dir / "sweep.json", j);
  for (const auto& p : s.points)
    std::cout << "axis " << p.axis << ": " << p.status << ", E " << p.e << ", P " << p.p
              << ", T " << p.t << ", nu " << p.nu << ", lambda0 " << p.lambda0 << '\n';
  for (const auto& f : s.flags) std::cout << "flag: " << f << '\n';
  print_report(v);
  return v.pass() ? kOk : kNumeric;
}

int run_sweep(const Common& c, const std::string& mode_s, const std::string& js, double nu,
              bool resume) {
  if (parse_mode(mode_s) != Mode::kA)
    throw ParameterError("sweep runs mode A; use ep-curve for mode B");
  const Nonlinearity nl = make_nonlinearity(c);
  const SweepResult s = sweep_Tmin(parse_list(js, "--j"), nu, nl, sweep_options(c, Mode::kA, resume));
  std::cout << "fit T_min = " << s.t_min_fit.coeff << " j^" << s.t_min_fit.exponent
            << ", S0 " << s.s0_estimate << ", j* " << s.j_star << ", S0 (Pohozaev) "
            << s.s0_pohozaev << '\n';
  return finish_sweep(c, s, verify_family_identities(s));
}

int run_ep_curve(const Common& c, const std::string& qs, bool resume) {
  const Nonlinearity nl = make_nonlinearity(c);
  const SweepResult s = ep_curve(parse_list(qs, "--q"), nl, sweep_options(c, Mode::kB, resume));
  return finish_sweep(c, s, verify_energy_momentum(s));
}

int run_ansatz(const Common& c, const std::string& kind, double r, double nu) {
  const Nonlinearity nl = make_nonlinearity(c);
  check_speed(nu);
  const Grid g = make_grid(c);
  Field w;
  if (kind == "wr") {
    w = make_wr(g, r);
  } else if (kind == "ring") {
    w = make_vortex_ring(g, r);
  } else {
    throw ParameterError("--kind must be wr or ring");
  }
  const fs::path dir = out_dir(c);
  save_field(dir / "ansatz.bin", w);
  const FunctionalReport rep = evaluate(w, nl, nu);
  nlohmann::json j{{"kind", kind}, {"r", r}, {"grid", grid_to_json(g)}, {"report", to_json(rep)}};
  write_json(dir / "ansatz.json", j);
  std::cout << j.dump(2) << '\n';
  return kOk;
}

int run_regularize(const Common& c, const std::string& input, double h,
                   const std::vector<int>& box, double eps, double r0) {
  if (input.empty()) throw ParameterError("regularize needs --input");
  const Field w = load_field(input);
  RegularizeOptions o;
  if (!box.empty()) {
    if (box.size() != 4) throw ParameterError("--box takes i0,i1,k0,k1");
    o.box = Box{box[0], box[1], box[2], box[3]};
  }
  const auto [u, rep] = regularize(w, h, o);
  const fs::path dir = out_dir(c);
  save_field(dir / "regularized.bin", u);
  nlohmann::json j = to_json(rep);
  const bool bound = rep.e_mod_u <= rep.e_mod_w + 1e-10;
  const bool el = rep.el_residual <= 1e-6 * rep.grad_norm || rep.converged;
  j["energy_bound_holds"] = bound;
  bool modulus_ok = true;
  if (eps > 0.0) {
    const ModulusControlReport m = modulus_control(w, h, eps, r0);
    j["modulus_control"] = to_json(m);
    modulus_ok = !m.applicable || m.pass;
  }
  write_json(dir / "regularize.json", j);
  std::cout << j.dump(2) << '\n';
  return bound && el && modulus_ok ? kOk : kNumeric;
}

int run_check(bool all, const std::vector<std::string>& suites, std::uint64_t seed) {
  if (!all && suites.empty()) throw ParameterError("check: use --all or --suite <name>");
  const CertifyReport r = run_invariant_suites(seed);
  CertifyReport sel;
  for (const auto& ch : r.checks)
    if (all || std::find(suites.begin(), suites.end(), ch.name) != suites.end())
      sel.checks.push_back(ch);
  if (sel.checks.empty()) throw ParameterError("check: no suite matches");
  print_report(sel);
  return sel.pass() ? kOk : kNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Traveling-wave solitons of nonlinear Schroedinger equations with |w| -> 1 at "
               "infinity, computed by constrained minimization on an axisymmetric grid."};
  app.footer(
      "Defaults: N=3, gp nonlinearity, grid 256x128, L1=L2=20 healing lengths.\n"
      "Options may also come from a key=value config file (--config); command-line flags "
      "override it.\nNLS_SOLITON_THREADS overrides the sweep worker count.\n"
      "Exit codes: 0 certified success, 1 numeric failure, 2 usage error.");
  app.set_config("--config", "", "Key=value (INI/TOML) config file");
  app.require_subcommand(1);
  app.fallthrough();

  Common c;
  app.add_option("--N", c.dim, "Ambient dimension N >= 3")->capture_default_str();
  app.add_option("--nonlinearity", c.nonlinearity, "gp or cubic-quintic")->capture_default_str();
  app.add_option("--c1", c.c1, "Cubic-quintic parameter c1 > 0")->capture_default_str();
  app.add_option("--n1", c.n1, "Nodes along x1")->capture_default_str();
  app.add_option("--n2", c.n2, "Nodes along rho")->capture_default_str();
  app.add_option("--L1", c.L1, "Half-length in x1")->capture_default_str();
  app.add_option("--L2", c.L2, "Radial extent")->capture_default_str();
  app.add_option("--output", c.output, "Output directory")->capture_default_str();
  app.add_option("--seed", c.seed, "Seed of the randomized suites")->capture_default_str();
  app.add_option("--threads", c.threads, "Sweep workers (0: hardware)")->capture_default_str();
  app.add_option("--max-iters", c.max_iters, "Iteration cap")->capture_default_str();
  app.add_option("--step", c.step, "Initial descent step")->capture_default_str();
  app.add_option("--tol-grad", c.tol_grad, "Normalized residual tolerance")->capture_default_str();
  app.add_option("--tol-constraint", c.tol_constraint, "Relative constraint drift")
      ->capture_default_str();
  app.add_option("--restore-every", c.restore_every, "Dilation restoration cadence (mode A)")
      ->capture_default_str();
  app.add_option("--check-every", c.check_every, "Convergence test cadence")
      ->capture_default_str();
  app.add_option("--time-limit", c.time_limit, "Wall-clock cap per solve in seconds, 0 = none")
      ->capture_default_str();

  std::string mode = "A", init;
  double j = 1.0, q = -30.0, nu = 0.5;
  auto* solve = app.add_subcommand("solve", "One constrained minimization; writes record.json/.bin");
  solve->add_option("--mode", mode, "A: min T at J = j (N >= 4); B: min E at P = q")
      ->capture_default_str();
  solve->add_option("--j", j, "Constraint J = j > 0 (mode A)")->capture_default_str();
  solve->add_option("--q", q, "Constraint P = q < 0 (mode B)")->capture_default_str();
  solve->add_option("--nu", nu, "Speed in (0, sqrt 2) (mode A)")->capture_default_str();
  solve->add_option("--init", init, "Initial field file instead of the built-in seed");

  std::string js = "0.5,1,2,4", qs = "-20,-30,-45,-65,-90";
  bool no_resume = false;
  auto* sweep = app.add_subcommand("sweep", "Mode A sweep over j; records.jsonl, curve.csv");
  sweep->add_option("--mode", mode, "Only A")->capture_default_str();
  sweep->add_option("--j", js, "Comma-separated j values")->capture_default_str();
  sweep->add_option("--nu", nu, "Speed in (0, sqrt 2)")->capture_default_str();
  sweep->add_flag("--no-resume", no_resume, "Ignore records already in the output directory");

  auto* ep = app.add_subcommand("ep-curve", "Mode B sweep over q; energy-momentum branch");
  ep->add_option("--q", qs, "Comma-separated q values")->capture_default_str();
  ep->add_flag("--no-resume", no_resume, "Ignore records already in the output directory");

  std::string kind = "wr";
  double r = 6.0;
  auto* ansatz = app.add_subcommand("ansatz", "Write a test field and its functionals");
  ansatz->add_option("--kind", kind, "wr (ring phase field) or ring (vortex-ring seed)")
      ->capture_default_str();
  ansatz->add_option("--r", r, "Ring radius")->capture_default_str();
  ansatz->add_option("--nu", nu, "Speed used in J and S")->capture_default_str();

  std::string input;
  double h = 0.2, eps = 0.0, r0 = 1.0;
  std::vector<int> box;
  auto* reg = app.add_subcommand("regularize", "Minimize E_Mod + h^-2 int Theta(|u - w|^2)");
  reg->set_help_flag("--help", "Print this help message and exit");  // -h is taken by --h
  reg->add_option("--input", input, "Field file")->check(CLI::ExistingFile);
  reg->add_option("--h", h, "Penalty length h > 0")->capture_default_str();
  reg->add_option("--box", box, "Free box i0,i1,k0,k1 (default: whole grid)")->delimiter(',');
  reg->add_option("--modulus-eps", eps, "Also run the modulus check with this eps (> 0)");
  reg->add_option("--r0", r0, "Margin unit of the modulus check")->capture_default_str();

  bool all = false;
  std::vector<std::string> suites;
  auto* check = app.add_subcommand("check", "Randomized invariant suites");
  check->add_flag("--all", all, "Run every suite");
  check->add_option("--suite", suites, "Run the named suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    int code = kUsage;
    if (*solve) code = run_solve(c, mode, j, q, nu, init);
    else if (*sweep) code = run_sweep(c, mode, js, nu, !no_resume);
    else if (*ep) code = run_ep_curve(c, qs, !no_resume);
    else if (*ansatz) code = run_ansatz(c, kind, r, nu);
    else if (*reg) code = run_regularize(c, input, h, box, eps, r0);
    else if (*check) code = run_check(all, suites, c.seed);
    if (code != kUsage) {
      std::ofstream cfg(fs::path(c.output) / "config.ini");
      if (cfg) cfg << app.config_to_str(true, false);
    }
    return code;
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << '\n';
    return kNumeric;
  }
}
