#pragma once

// Detuning sweeps: one ground-state solve and measurement per grid point,
// embarrassingly parallel over points. Results are index-addressed so the
// output is identical for any worker count, and a failing point marks its row
// instead of aborting the sweep.

#include <atomic>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "ionjch/crystal.hpp"
#include "ionjch/errors.hpp"
#include "ionjch/fockspace.hpp"
#include "ionjch/format.hpp"
#include "ionjch/hamiltonian.hpp"
#include "ionjch/observables.hpp"
#include "ionjch/solver.hpp"
#include "ionjch/version.hpp"

namespace ionjch {

struct SweepSpec {
  int n_ions = 5;
  int n_excitations = 5;
  double t_over_g = 0.3;
  double delta_min = -15.0;  // grid in units of g
  double delta_max = 15.0;
  int steps = 301;
  bool include_site_frequencies = true;
  SolveMethod method = SolveMethod::iterative;
  double epsilon_mi = 0.1;  // "small variance" threshold for phase labels
  int workers = 0;          // 0: PC_WORKERS env var, else hardware concurrency
  std::size_t basis_capacity = SectorBasis::default_capacity;

  void validate() const {
    if (n_ions < 1) throw DomainError("sweep: n_ions must be >= 1");
    if (n_excitations < 0) throw DomainError("sweep: n_excitations must be >= 0");
    if (steps < 2) throw DomainError("sweep: need at least 2 grid points");
    if (!(delta_min < delta_max)) throw DomainError("sweep: need delta_min < delta_max");
    if (t_over_g < 0.0) throw DomainError("sweep: t_over_g must be >= 0");
    if (!(epsilon_mi > 0.0)) throw DomainError("sweep: epsilon_mi must be > 0");
  }

  std::vector<double> grid() const {
    std::vector<double> g(steps);
    for (int i = 0; i < steps; ++i)
      g[i] = delta_min + (delta_max - delta_min) * i / (steps - 1);
    return g;
  }

  std::string echo() const {
    std::string s = "ions=" + std::to_string(n_ions) +
                    " excitations=" + std::to_string(n_excitations) +
                    " t_over_g=" + format_double(t_over_g) + " delta=[" +
                    format_double(delta_min) + "," + format_double(delta_max) +
                    "] steps=" + std::to_string(steps) +
                    " site_frequencies=" + (include_site_frequencies ? "1" : "0") +
                    " method=";
    switch (method) {
      case SolveMethod::automatic: s += "auto"; break;
      case SolveMethod::dense: s += "dense"; break;
      case SolveMethod::iterative: s += "iterative"; break;
    }
    return s;
  }
};

struct SweepRow {
  double delta_over_g = 0.0;
  bool ok = false;
  std::string status;  // "ok" or the error that failed this row
  double energy = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::quiet_NaN();
  bool degenerate = false;
  ObservableSet observables;  // empty sites when !ok
};

struct Provenance {
  std::string software_version;
  std::string spec_echo;
  std::uint64_t basis_fingerprint = 0;
};

struct SweepResult {
  SweepSpec spec;
  Provenance provenance;
  std::vector<SweepRow> rows;

  std::size_t failed_rows() const {
    std::size_t n = 0;
    for (const auto& r : rows)
      if (!r.ok) ++n;
    return n;
  }
};

inline int resolve_workers(int requested, int n_tasks) {
  int w = requested;
  if (w <= 0) {
    if (const char* env = std::getenv("PC_WORKERS")) w = std::atoi(env);
    if (w <= 0) w = static_cast<int>(std::thread::hardware_concurrency());
    if (w <= 0) w = 1;
  }
  return std::max(1, std::min(w, n_tasks));
}

inline SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();
  const auto positions = equilibrium_positions(spec.n_ions);
  const auto geometry = site_couplings_scaled(positions, spec.t_over_g);
  const SectorBasis basis(spec.n_ions, spec.n_excitations, spec.basis_capacity);
  const auto grid = spec.grid();

  SweepResult result;
  result.spec = spec;
  result.provenance = {version, spec.echo(), basis.fingerprint()};
  result.rows.resize(grid.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= grid.size()) return;
      auto& row = result.rows[i];
      row.delta_over_g = grid[i];
      try {
        HamiltonianSpec hspec;
        hspec.geometry = geometry;
        hspec.delta_over_g = grid[i];
        hspec.include_site_frequencies = spec.include_site_frequencies;
        const auto ground = ground_state(build(hspec, basis), spec.method);
        row.energy = ground.energy;
        row.gap = ground.gap;
        row.degenerate = ground.degenerate;
        row.observables = measure(ground, basis, grid[i], spec.t_over_g);
        row.ok = true;
        row.status = "ok";
      } catch (const std::exception& e) {
        row.ok = false;
        row.status = e.what();
      }
    }
  };

  const int n_workers = resolve_workers(spec.workers, static_cast<int>(grid.size()));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return result;
}

// Heuristic reading of the variance pair (D N_k, D N_{a,k}) against a single
// threshold. A visualization aid, not a physics claim: the finite chain has no
// sharp boundaries.
enum class PhaseLabel { qubit_mi, collective_mi, collective_sf, phononic_sf };

inline const char* to_string(PhaseLabel label) {
  switch (label) {
    case PhaseLabel::qubit_mi: return "qubit-MI";
    case PhaseLabel::collective_mi: return "collective-MI";
    case PhaseLabel::collective_sf: return "collective-SF";
    case PhaseLabel::phononic_sf: return "phononic-SF";
  }
  return "?";
}

inline PhaseLabel classify_site(double var_total, double var_qubit, double epsilon_mi) {
  const bool total_small = var_total < epsilon_mi;
  const bool qubit_small = var_qubit < epsilon_mi;
  if (total_small && qubit_small) return PhaseLabel::qubit_mi;
  if (total_small) return PhaseLabel::collective_mi;
  if (qubit_small) return PhaseLabel::phononic_sf;
  return PhaseLabel::collective_sf;
}

// Per-row, per-site labels; failed rows get an empty label vector.
inline std::vector<std::vector<PhaseLabel>> classify_phases(const SweepResult& result,
                                                            double epsilon_mi) {
  if (!(epsilon_mi > 0.0)) throw DomainError("classify_phases: epsilon_mi must be > 0");
  std::vector<std::vector<PhaseLabel>> labels(result.rows.size());
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const auto& row = result.rows[i];
    if (!row.ok) continue;
    labels[i].reserve(row.observables.sites.size());
    for (const auto& site : row.observables.sites)
      labels[i].push_back(classify_site(site.var_total, site.var_qubit, epsilon_mi));
  }
  return labels;
}

inline std::vector<std::vector<PhaseLabel>> classify_phases(const SweepResult& result) {
  return classify_phases(result, result.spec.epsilon_mi);
}

}  // namespace ionjch
