// Command-line front end: derives model coefficients from trap geometry,
// solves fixed-excitation sectors of the trapped-ion JCH model and emits the
// plot-ready datasets (crystal report, Mott-lobe CSV, single-point JSON,
// detuning-sweep CSV/JSON).
//
// Exit codes: 0 ok, 2 usage error, 3 domain/capacity error, 4 solver failure
// (for sweep: every row failed), 1 unexpected internal error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "ionjch/crystal.hpp"
#include "ionjch/fockspace.hpp"
#include "ionjch/format.hpp"
#include "ionjch/hamiltonian.hpp"
#include "ionjch/observables.hpp"
#include "ionjch/report.hpp"
#include "ionjch/solver.hpp"
#include "ionjch/sweeps.hpp"
#include "ionjch/version.hpp"

namespace {

using namespace ionjch;

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DomainError("cannot open output file: " + path);
  os << content;
}

SolveMethod parse_method(const std::string& name) {
  if (name == "auto") return SolveMethod::automatic;
  if (name == "dense") return SolveMethod::dense;
  if (name == "iterative") return SolveMethod::iterative;
  throw CLI::ValidationError("--method", "expected auto, dense or iterative");
}

bool given(const CLI::Option* option) { return option != nullptr && option->count() > 0; }

// Options shared by `ground` and `sweep`: either direct g-units inputs or the
// physical trap parameters they are derived from. Exactly one units mode.
struct UnitsOptions {
  std::string units = "g";
  double t_over_g = 0.0;
  double delta_over_g = 0.0;
  double omega_z = 0.0, omega_x = 0.0, rabi = 0.0, lamb_dicke = 0.0;
  CLI::Option* opt_t = nullptr;
  CLI::Option* opt_delta = nullptr;
  CLI::Option* opt_omega_z = nullptr;
  CLI::Option* opt_omega_x = nullptr;
  CLI::Option* opt_rabi = nullptr;
  CLI::Option* opt_eta = nullptr;

  void add_to(CLI::App* cmd, bool with_single_delta) {
    cmd->add_option("--units", units, "Input units: g (default) or physical")
        ->check(CLI::IsMember({"g", "physical"}));
    opt_t = cmd->add_option("--t-over-g", t_over_g,
                            "Hopping scale t = alpha*omega_z/2 in units of g");
    if (with_single_delta)
      opt_delta =
          cmd->add_option("--delta-over-g", delta_over_g, "Detuning Delta in units of g");
    opt_omega_z =
        cmd->add_option("--omega-z", omega_z, "Axial trap frequency (rad/s, physical mode)");
    opt_omega_x =
        cmd->add_option("--omega-x", omega_x, "Radial trap frequency (rad/s, physical mode)");
    opt_rabi = cmd->add_option("--rabi", rabi, "Rabi frequency (rad/s, physical mode)");
    opt_eta =
        cmd->add_option("--lamb-dicke", lamb_dicke, "Lamb-Dicke parameter (physical mode)");
  }

  // Returns (t_over_g, g in rad/s; 1.0 in g-units mode). Physical-mode
  // detuning inputs are rad/s and must be divided by the returned g.
  std::pair<double, double> resolve(int n_ions) const {
    if (units == "g") {
      if (given(opt_omega_z) || given(opt_omega_x) || given(opt_rabi) || given(opt_eta))
        throw CLI::ValidationError(
            "--units", "physical trap options are only valid with --units physical");
      if (!given(opt_t)) throw CLI::RequiredError("--t-over-g");
      return {t_over_g, 1.0};
    }
    if (given(opt_t) || given(opt_delta))
      throw CLI::ValidationError(
          "--units", "--t-over-g/--delta-over-g are only valid with --units g");
    if (!given(opt_omega_z)) throw CLI::RequiredError("--omega-z");
    if (!given(opt_omega_x)) throw CLI::RequiredError("--omega-x");
    if (!given(opt_rabi)) throw CLI::RequiredError("--rabi");
    if (!given(opt_eta)) throw CLI::RequiredError("--lamb-dicke");
    PhysicalTrapConfig cfg;
    cfg.n_ions = n_ions;
    cfg.omega_z = omega_z;
    cfg.omega_x = omega_x;
    cfg.rabi = rabi;
    cfg.lamb_dicke = lamb_dicke;
    const auto model = physical_to_model(cfg);
    if (model.rwa_warning)
      std::cerr << "warning: t_km or g is within a factor 10 of omega_x; the "
                   "number-conserving model is marginal here\n";
    return {model.t_scale, cfg.coupling()};
  }
};

int run_crystal(int n_ions, double alpha, double t_over_g, const std::string& out_path) {
  const auto u = equilibrium_positions(n_ions);
  const auto modes = radial_modes(mode_matrix(u), alpha);
  const auto geo = site_couplings_scaled(u, t_over_g);

  std::ostringstream os;
  os << "ionjch crystal report (version " << version << ")\n";
  os << "ions: " << n_ions << "  alpha: " << format_double(alpha)
     << "  t_over_g: " << format_double(t_over_g) << "\n\n";
  os << "positions u_k:";
  for (int k = 0; k < n_ions; ++k) os << ' ' << format_double(u[k]);
  os << "\n\nlambda:";
  for (int p = 0; p < n_ions; ++p) os << ' ' << format_double(modes.eigenvalues[p]);
  os << "\n\nmode table (p, lambda_p, gamma_p, theta_p, cosh(theta_p)-1, omega_p/omega_x):\n";
  for (int p = 0; p < n_ions; ++p)
    os << p + 1 << ' ' << format_double(modes.eigenvalues[p]) << ' '
       << format_double(modes.gammas[p]) << ' ' << format_double(modes.thetas[p]) << ' '
       << format_double(std::cosh(modes.thetas[p]) - 1.0) << ' '
       << format_double(modes.collective_frequencies[p]) << '\n';
  os << "\neigenvectors b^(p) (column p, sites top to bottom):\n";
  for (int k = 0; k < n_ions; ++k) {
    for (int p = 0; p < n_ions; ++p)
      os << (p ? " " : "") << format_double(modes.eigenvectors(k, p));
    os << '\n';
  }
  os << "\nsite frequencies omega_k (units of g):";
  for (int k = 0; k < n_ions; ++k) os << ' ' << format_double(geo.site_frequencies[k]);
  os << '\n';
  os << "\nhopping t_km (units of g):";
  if (n_ions == 1) {
    os << " none\n";
  } else {
    os << '\n';
    for (int k = 0; k < n_ions; ++k) {
      for (int m = 0; m < n_ions; ++m)
        os << (m ? " " : "") << format_double(geo.hopping(k, m));
      os << '\n';
    }
  }
  write_output(out_path, os.str());
  return 0;
}

struct GroundOptions {
  int n_ions = 0;
  int n_excitations = -1;
  UnitsOptions units;
  double delta_phys = 0.0;  // rad/s, physical mode
  CLI::Option* opt_delta_phys = nullptr;
  bool no_site_frequencies = false;
  std::string method = "auto";
  std::string output;
  std::string dump_matrix_path;
  std::string dump_basis_path;
  std::size_t capacity = SectorBasis::default_capacity;
};

int run_ground(const GroundOptions& opt) {
  if (opt.n_ions < 1) throw CLI::RequiredError("--ions");
  if (opt.n_excitations < 0) throw CLI::RequiredError("--excitations");
  const auto [t_over_g, g_phys] = opt.units.resolve(opt.n_ions);
  double delta_over_g = 0.0;
  if (opt.units.units == "g") {
    if (!given(opt.units.opt_delta)) throw CLI::RequiredError("--delta-over-g");
    delta_over_g = opt.units.delta_over_g;
  } else {
    if (!given(opt.opt_delta_phys)) throw CLI::RequiredError("--delta");
    delta_over_g = opt.delta_phys / g_phys;
  }

  const auto positions = equilibrium_positions(opt.n_ions);
  HamiltonianSpec hspec;
  hspec.geometry = site_couplings_scaled(positions, t_over_g);
  hspec.delta_over_g = delta_over_g;
  hspec.include_site_frequencies = !opt.no_site_frequencies;
  const SectorBasis basis(opt.n_ions, opt.n_excitations, opt.capacity);
  const auto op = build(hspec, basis);

  if (!opt.dump_basis_path.empty()) {
    std::ofstream os(opt.dump_basis_path, std::ios::binary);
    if (!os) throw DomainError("cannot open dump file: " + opt.dump_basis_path);
    dump_basis(basis, os);
  }
  if (!opt.dump_matrix_path.empty()) {
    std::ofstream os(opt.dump_matrix_path, std::ios::binary);
    if (!os) throw DomainError("cannot open dump file: " + opt.dump_matrix_path);
    dump_matrix(op, basis, os);
  }

  const auto ground = ground_state(op, parse_method(opt.method));
  const auto obs = measure(ground, basis, delta_over_g, t_over_g);
  Provenance prov{version,
                  "ions=" + std::to_string(opt.n_ions) +
                      " excitations=" + std::to_string(opt.n_excitations) +
                      " t_over_g=" + format_double(t_over_g) +
                      " delta_over_g=" + format_double(delta_over_g) +
                      " site_frequencies=" + (hspec.include_site_frequencies ? "1" : "0"),
                  basis.fingerprint()};
  write_output(opt.output, ground_report_json(ground, obs, prov).dump(2) + "\n");
  return 0;
}

struct SweepOptions {
  SweepSpec spec;
  UnitsOptions units;
  double delta_min_in = 0.0, delta_max_in = 0.0;
  CLI::Option* opt_delta_min = nullptr;
  CLI::Option* opt_delta_max = nullptr;
  bool no_site_frequencies = false;
  std::string method = "iterative";
  bool classify = false;
  std::string format = "csv";
  std::string output;
  std::string dump_basis_path;
};

int run_sweep_cmd(SweepOptions& opt) {
  if (opt.spec.n_ions < 1) throw CLI::RequiredError("--ions");
  if (opt.spec.n_excitations < 0) throw CLI::RequiredError("--excitations");
  const auto [t_over_g, g_phys] = opt.units.resolve(opt.spec.n_ions);
  opt.spec.t_over_g = t_over_g;
  if (given(opt.opt_delta_min)) opt.spec.delta_min = opt.delta_min_in / g_phys;
  if (given(opt.opt_delta_max)) opt.spec.delta_max = opt.delta_max_in / g_phys;
  opt.spec.include_site_frequencies = !opt.no_site_frequencies;
  opt.spec.method = parse_method(opt.method);

  const auto result = run_sweep(opt.spec);

  if (!opt.dump_basis_path.empty()) {
    std::ofstream os(opt.dump_basis_path, std::ios::binary);
    if (!os) throw DomainError("cannot open dump file: " + opt.dump_basis_path);
    const SectorBasis basis(opt.spec.n_ions, opt.spec.n_excitations,
                            opt.spec.basis_capacity);
    dump_basis(basis, os);
  }

  std::optional<std::vector<std::vector<PhaseLabel>>> labels;
  if (opt.classify) labels = classify_phases(result);

  std::string content;
  if (opt.format == "csv") {
    std::ostringstream os;
    write_sweep_csv(os, result, labels ? &*labels : nullptr);
    content = os.str();
  } else {
    content = sweep_report_json(result, labels ? &*labels : nullptr).dump(2) + "\n";
  }
  write_output(opt.output, content);

  const std::size_t failed = result.failed_rows();
  if (failed == result.rows.size())
    throw SolverError("sweep: all " + std::to_string(failed) + " rows failed", 0.0);
  if (failed > 0)
    std::cerr << "warning: " << failed << " of " << result.rows.size()
              << " sweep rows failed (see status column)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trapped-ion Jaynes-Cummings-Hubbard simulator"};
  app.set_version_flag("--version", ionjch::version);
  app.set_config("--config", "",
                 "Key-value config file with one section per subcommand; "
                 "command-line flags override file values");
  app.require_subcommand(1);

  // crystal ------------------------------------------------------------
  auto* crystal = app.add_subcommand(
      "crystal", "Equilibrium positions, normal modes and couplings of the chain");
  int cr_ions = 0;
  double cr_alpha = 0.1, cr_t = 1.0;
  std::string cr_out;
  crystal->add_option("--ions", cr_ions, "Number of ions")->required();
  crystal->add_option("--alpha", cr_alpha, "Trap anisotropy omega_z/omega_x (default 0.1)");
  crystal->add_option("--t-over-g", cr_t,
                      "Hopping scale alpha*omega_z/2 in units of g (default 1)");
  crystal->add_option("--output,-o", cr_out, "Output file (default stdout)");
  crystal->callback([&]() { run_crystal(cr_ions, cr_alpha, cr_t, cr_out); });

  // mott ---------------------------------------------------------------
  auto* mott = app.add_subcommand(
      "mott", "Single-site chemical potential and Mott lobes over a detuning grid");
  double mt_min = -15.0, mt_max = 15.0;
  int mt_steps = 301, mt_nmax = 5;
  std::string mt_out;
  mott->add_option("--delta-min", mt_min, "Grid start, units of g (default -15)");
  mott->add_option("--delta-max", mt_max, "Grid end, units of g (default 15)");
  mott->add_option("--steps", mt_steps, "Grid points (default 301)");
  mott->add_option("--n-max", mt_nmax, "Highest excitation count (default 5)");
  mott->add_option("--output,-o", mt_out, "Output file (default stdout)");
  mott->callback([&]() {
    if (mt_steps < 1) throw CLI::ValidationError("--steps", "need at least one point");
    if (!(mt_min <= mt_max))
      throw CLI::ValidationError("--delta-min", "grid start must not exceed end");
    std::vector<double> grid(mt_steps);
    for (int i = 0; i < mt_steps; ++i)
      grid[i] = mt_steps == 1 ? mt_min : mt_min + (mt_max - mt_min) * i / (mt_steps - 1);
    std::ostringstream os;
    write_mott_csv(os, mott_lobes(grid, mt_nmax));
    write_output(mt_out, os.str());
  });

  // ground -------------------------------------------------------------
  auto* ground = app.add_subcommand(
      "ground", "Ground state and observables of one sector at one detuning (JSON)");
  GroundOptions go;
  ground->add_option("--ions", go.n_ions, "Number of ions");
  ground->add_option("--excitations,-M", go.n_excitations, "Total excitations M");
  go.units.add_to(ground, /*with_single_delta=*/true);
  go.opt_delta_phys =
      ground->add_option("--delta", go.delta_phys, "Detuning Delta (rad/s, physical mode)");
  ground->add_flag("--no-site-frequencies", go.no_site_frequencies,
                   "Drop the omega_k site-frequency term");
  ground->add_option("--method", go.method, "auto | dense | iterative (default auto)");
  ground->add_option("--dump-matrix", go.dump_matrix_path,
                     "Write the sector Hamiltonian in coordinate text form");
  ground->add_option("--dump-basis", go.dump_basis_path, "Write the sector basis listing");
  ground->add_option("--capacity", go.capacity, "Basis dimension cap (default 5e6)");
  ground->add_option("--output,-o", go.output, "Output file (default stdout)");
  ground->callback([&]() { run_ground(go); });

  // sweep ----------------------------------------------------------------
  auto* sweep = app.add_subcommand(
      "sweep", "Detuning sweep of ground-state observables (CSV or JSON)");
  SweepOptions so;
  so.spec.n_ions = 0;        // require explicit --ions
  so.spec.n_excitations = -1;
  sweep->add_option("--ions", so.spec.n_ions, "Number of ions");
  sweep->add_option("--excitations,-M", so.spec.n_excitations, "Total excitations M");
  so.units.add_to(sweep, /*with_single_delta=*/false);
  so.opt_delta_min = sweep->add_option(
      "--delta-min", so.delta_min_in,
      "Grid start (units of g; rad/s in physical mode; default -15g)");
  so.opt_delta_max =
      sweep->add_option("--delta-max", so.delta_max_in, "Grid end (default +15g)");
  sweep->add_option("--steps", so.spec.steps, "Grid points (default 301)");
  sweep->add_flag("--no-site-frequencies", so.no_site_frequencies,
                  "Drop the omega_k site-frequency term");
  sweep->add_option("--method", so.method, "auto | dense | iterative (default iterative)");
  sweep->add_option("--workers", so.spec.workers,
                    "Worker threads (default: PC_WORKERS env, else hardware)");
  sweep->add_flag("--classify", so.classify, "Append heuristic phase labels per site");
  sweep->add_option("--epsilon-mi", so.spec.epsilon_mi,
                    "Variance threshold for the phase labels (default 0.1)");
  sweep->add_option("--format", so.format, "csv (default) or json")
      ->check(CLI::IsMember({"csv", "json"}));
  sweep->add_option("--capacity", so.spec.basis_capacity, "Basis dimension cap");
  sweep->add_option("--dump-basis", so.dump_basis_path, "Write the sector basis listing");
  sweep->add_option("--output,-o", so.output, "Output file (default stdout)");
  sweep->callback([&]() { run_sweep_cmd(so); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const ionjch::SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return 4;
  } catch (const ionjch::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
