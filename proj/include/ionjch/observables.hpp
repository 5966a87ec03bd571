#pragma once

// Ground-state diagnostics: per-site means and fluctuations of the total,
// qubit and phonon excitation numbers, the analytic single-site chemical
// potential and Mott lobes, and the delocalized (superfluid) reference state
// built from the softest radial mode.
//
// Fluctuations follow the convention D N = sqrt(<N^2> - <N>^2); the var_*
// fields hold that square-rooted form (a standard deviation), not its square.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <vector>

#include "ionjch/crystal.hpp"
#include "ionjch/errors.hpp"
#include "ionjch/fockspace.hpp"
#include "ionjch/solver.hpp"

namespace ionjch {

struct SiteObservables {
  double mean_total = 0.0;   // <N_k> = <n_k + s_k>
  double var_total = 0.0;    // D N_k
  double mean_qubit = 0.0;   // <s_k>
  double var_qubit = 0.0;    // D N_{a,k} = sqrt(<s_k> - <s_k>^2)
  double mean_phonon = 0.0;  // <n_k>
};

struct ObservableSet {
  int n_sites = 0;
  int total_excitations = 0;
  double delta_over_g = std::numeric_limits<double>::quiet_NaN();  // metadata
  double t_over_g = std::numeric_limits<double>::quiet_NaN();      // metadata
  bool degenerate = false;
  std::vector<SiteObservables> sites;
};

// Diagonal expectation values by direct summation over the amplitudes; N_k,
// s_k and n_k are all diagonal in the occupation basis.
inline ObservableSet measure(
    const GroundStateResult& result, const SectorBasis& basis,
    double delta_over_g = std::numeric_limits<double>::quiet_NaN(),
    double t_over_g = std::numeric_limits<double>::quiet_NaN()) {
  if (static_cast<std::size_t>(result.vector.size()) != basis.dimension())
    throw ConsistencyError("measure: state vector does not match the basis dimension");

  ObservableSet obs;
  obs.n_sites = basis.n_sites();
  obs.total_excitations = basis.total_excitations();
  obs.delta_over_g = delta_over_g;
  obs.t_over_g = t_over_g;
  obs.degenerate = result.degenerate;
  obs.sites.resize(basis.n_sites());

  for (int k = 0; k < basis.n_sites(); ++k) {
    double m1 = 0.0, q = 0.0, ph = 0.0;
    for (std::size_t i = 0; i < basis.dimension(); ++i) {
      const double w = result.vector[i] * result.vector[i];
      m1 += w * (basis.phonon(i, k) + basis.qubit(i, k));
      q += w * basis.qubit(i, k);
      ph += w * basis.phonon(i, k);
    }
    // Second pass with shifted moments: summing w (N - <N>)^2 avoids the
    // catastrophic cancellation of <N^2> - <N>^2 near a sharp distribution.
    double var_t = 0.0, var_q = 0.0;
    for (std::size_t i = 0; i < basis.dimension(); ++i) {
      const double w = result.vector[i] * result.vector[i];
      const double dt = (basis.phonon(i, k) + basis.qubit(i, k)) - m1;
      const double dq = basis.qubit(i, k) - q;
      var_t += w * dt * dt;
      var_q += w * dq * dq;
    }
    auto& site = obs.sites[k];
    site.mean_total = m1;
    site.var_total = std::sqrt(var_t);
    site.mean_qubit = q;
    site.var_qubit = std::sqrt(var_q);  // equals sqrt(<s> - <s>^2) since s^2 = s
    site.mean_phonon = ph;
  }
  return obs;
}

// Ground energy of the zero-hopping single-site block with n excitations:
// E_g(0) = 0 and E_g(n) = Delta/2 - sqrt(Delta^2/4 + n g^2) (omega_1 = 0 for a
// single ion).
inline double single_site_ground_energy(int n, double delta_over_g) {
  if (n < 0) throw DomainError("single_site_ground_energy: n must be >= 0");
  if (n == 0) return 0.0;
  return delta_over_g / 2.0 -
         std::sqrt(delta_over_g * delta_over_g / 4.0 + static_cast<double>(n));
}

// Chemical potential mu(n) = E_g(n+1) - E_g(n) sampled over a detuning grid,
// one curve per n, plus the lobe widths dmu_n = mu(n+1) - mu(n) (absent on the
// last curve).
struct MottCurve {
  int n = 0;
  std::vector<double> delta;  // grid, units of g
  std::vector<double> mu;
  std::vector<double> dmu;    // empty for n = n_max
};

inline std::vector<MottCurve> mott_lobes(const std::vector<double>& delta_grid,
                                         int n_max) {
  if (n_max < 1) throw DomainError("mott_lobes: n_max must be >= 1");
  std::vector<MottCurve> curves(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    auto& c = curves[n];
    c.n = n;
    c.delta = delta_grid;
    c.mu.reserve(delta_grid.size());
    for (const double d : delta_grid)
      c.mu.push_back(single_site_ground_energy(n + 1, d) - single_site_ground_energy(n, d));
  }
  for (int n = 0; n < n_max; ++n) {
    auto& c = curves[n];
    c.dmu.resize(delta_grid.size());
    for (std::size_t i = 0; i < delta_grid.size(); ++i)
      c.dmu[i] = curves[n + 1].mu[i] - c.mu[i];
  }
  return curves;
}

// The delocalized reference state: M phonons condensed into the softest radial
// mode (p = N), expanded over the phonon configurations of the sector,
//   amplitude(n_1..n_N) = sqrt(M!/prod n_k!) prod_k (b_k^(N))^{n_k},
// with zero weight on any qubit-excited configuration. The commensurate case
// M = N is the physical one; allow_noncommensurate extends the same
// construction to other sectors.
inline Eigen::VectorXd superfluid_reference(const RadialModeSet& modes,
                                            const SectorBasis& basis,
                                            bool allow_noncommensurate = false) {
  const int n = basis.n_sites();
  const int m = basis.total_excitations();
  if (modes.n_modes() != n)
    throw ConsistencyError("superfluid_reference: mode set does not match the basis");
  if (m != n && !allow_noncommensurate)
    throw DomainError(
        "superfluid_reference: sector is not commensurate (M != N); pass "
        "allow_noncommensurate to condense M phonons into the same mode");

  const Eigen::VectorXd b = modes.eigenvectors.col(n - 1);
  double m_factorial = 1.0;
  for (int i = 2; i <= m; ++i) m_factorial *= i;

  Eigen::VectorXd psi = Eigen::VectorXd::Zero(basis.dimension());
  for (std::size_t i = 0; i < basis.dimension(); ++i) {
    bool qubit_free = true;
    for (int k = 0; k < n && qubit_free; ++k) qubit_free = basis.qubit(i, k) == 0;
    if (!qubit_free) continue;
    double denom = 1.0, product = 1.0;
    for (int k = 0; k < n; ++k) {
      const int nk = basis.phonon(i, k);
      for (int f = 2; f <= nk; ++f) denom *= f;
      product *= std::pow(b[k], nk);
    }
    psi[i] = std::sqrt(m_factorial / denom) * product;
  }
  psi.normalize();  // exact up to roundoff; the expansion is complete
  return psi;
}

}  // namespace ionjch
