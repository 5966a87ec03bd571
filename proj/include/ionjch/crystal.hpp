#pragma once

// Ion-crystal structure for a linear Paul trap: equilibrium positions of the
// Coulomb chain, the dimensionless mode matrix and its radial normal modes,
// the Bogoliubov angles connecting local and collective phonons, the
// position-dependent site frequencies and phonon hopping strengths, and the
// squeezed-state amplitudes of a collective vacuum in the local Fock basis.
//
// Units: positions are in the Coulomb length scale l, energies in the qubit-
// phonon coupling g (the internal unit, g = 1), collective frequencies in the
// radial trap frequency omega_x.

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "ionjch/errors.hpp"

namespace ionjch {

// Raw laboratory-frame trap and laser parameters (all angular frequencies in
// rad/s). The ion mass, charge and length scale only fix the meaning of the
// dimensionless positions; they never enter any computation here.
struct PhysicalTrapConfig {
  int n_ions = 1;
  double omega_z = 0.0;     // axial trap frequency
  double omega_x = 0.0;     // radial trap frequency; omega_x > omega_z for a linear chain
  double rabi = 0.0;        // laser Rabi frequency (real-valued)
  double lamb_dicke = 0.0;  // eta
  double delta = 0.0;       // detuning from the red sideband

  double coupling() const { return lamb_dicke * rabi; }  // g = eta * Omega
  double anisotropy() const { return omega_z / omega_x; }

  void validate() const {
    if (n_ions < 1) throw DomainError("n_ions must be >= 1");
    if (!(omega_z > 0.0) || !(omega_x > 0.0))
      throw DomainError("trap frequencies must be positive");
    if (!(omega_x > omega_z))
      throw DomainError("linear configuration requires omega_x > omega_z");
    if (lamb_dicke < 0.0) throw DomainError("lamb_dicke must be >= 0");
  }
};

// Dimensionless model inputs with g as the energy unit.
struct ModelParameters {
  int n_ions = 1;
  double alpha = 0.0;         // omega_z / omega_x
  double t_scale = 0.0;       // alpha*omega_z/2 in units of g (the hopping scale t)
  double delta_over_g = 0.0;
  bool rwa_warning = false;   // set when t_km or g come within a factor 10 of omega_x

  static constexpr double g = 1.0;
};

// Equilibrium positions plus the couplings of the phonon lattice they induce,
// in units of g.
struct IonChainGeometry {
  Eigen::VectorXd positions;         // u_k, strictly increasing, antisymmetric about 0
  Eigen::VectorXd site_frequencies;  // omega_k; negative for N >= 2
  Eigen::MatrixXd hopping;           // t_km, symmetric, zero diagonal
  double coupling_scale = 0.0;       // the alpha*omega_z/2 prefactor shared by both

  int n_ions() const { return static_cast<int>(positions.size()); }
};

// Radial normal modes of the chain. Modes are ordered by ascending mode-matrix
// eigenvalue lambda_p, so p = N (last) is the lowest radial frequency.
struct RadialModeSet {
  Eigen::VectorXd eigenvalues;            // lambda_p, ascending; lambda_1 = 1 (COM)
  Eigen::MatrixXd eigenvectors;           // column p = b^(p), orthonormal
  Eigen::VectorXd gammas;                 // gamma_p = 1 + alpha^2 (1 - lambda_p)/2
  Eigen::VectorXd thetas;                 // theta_p = -ln(gamma_p)/4
  Eigen::VectorXd collective_frequencies; // omega_p / omega_x = sqrt(gamma_p)

  int n_modes() const { return static_cast<int>(eigenvalues.size()); }
};

// Even-Fock expansion of a single-mode squeezed vacuum with angle theta:
// amplitudes[n] multiplies |2n>.
struct SqueezedStateAmplitudes {
  double theta = 0.0;
  std::vector<double> amplitudes;
  double truncation_deficit = 0.0;  // 1 - sum amplitudes^2
};

namespace detail {

// Force residual of the dimensionless equilibrium equations,
//   F_m = u_m - sum_{k<m} (u_m-u_k)^-2 + sum_{k>m} (u_m-u_k)^-2.
inline Eigen::VectorXd force_residual(const Eigen::VectorXd& u) {
  const int n = static_cast<int>(u.size());
  Eigen::VectorXd f = u;
  for (int m = 0; m < n; ++m) {
    for (int k = 0; k < m; ++k) f[m] -= 1.0 / std::pow(u[m] - u[k], 2);
    for (int k = m + 1; k < n; ++k) f[m] += 1.0 / std::pow(u[m] - u[k], 2);
  }
  return f;
}

inline bool strictly_increasing(const Eigen::VectorXd& u) {
  for (int k = 0; k + 1 < static_cast<int>(u.size()); ++k)
    if (!(u[k] < u[k + 1])) return false;
  return true;
}

}  // namespace detail

// Mode matrix A_km = delta_km + 2 sum_{s != k} (delta_km - delta_sm)/|u_k - u_s|^3.
// Also the Jacobian of the force residual, which Newton's method exploits.
inline Eigen::MatrixXd mode_matrix(const Eigen::VectorXd& positions) {
  const int n = static_cast<int>(positions.size());
  if (n < 1) throw DomainError("mode_matrix: need at least one ion");
  if (!detail::strictly_increasing(positions))
    throw DomainError("mode_matrix: positions must be strictly increasing");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    double diag = 1.0;
    for (int s = 0; s < n; ++s) {
      if (s == k) continue;
      const double inv3 = 1.0 / std::pow(std::abs(positions[k] - positions[s]), 3);
      diag += 2.0 * inv3;
      a(k, s) = -2.0 * inv3;
    }
    a(k, k) = diag;
  }
  return a;
}

// Solves the force-balance equations by damped Newton iteration from a
// uniform-spacing guess spanning 2*(0.48*N^0.56). Deterministic; the result is
// symmetrized exactly (u_k = -u_{N+1-k} bitwise), which every downstream
// reflection-symmetry property relies on.
inline Eigen::VectorXd equilibrium_positions(int n_ions, double tolerance = 1e-12) {
  if (n_ions < 1) throw DomainError("equilibrium_positions: n_ions must be >= 1");
  if (!(tolerance > 0.0)) throw DomainError("equilibrium_positions: tolerance must be > 0");
  Eigen::VectorXd u(n_ions);
  if (n_ions == 1) {
    u[0] = 0.0;
    return u;
  }

  const double half_span = 0.48 * std::pow(static_cast<double>(n_ions), 0.56);
  for (int k = 0; k < n_ions; ++k)
    u[k] = -half_span + 2.0 * half_span * k / (n_ions - 1);

  auto symmetrize = [n_ions](Eigen::VectorXd& v) {
    for (int k = 0; k < n_ions / 2; ++k) {
      const double a = 0.5 * (v[k] - v[n_ions - 1 - k]);
      v[k] = a;
      v[n_ions - 1 - k] = -a;
    }
    if (n_ions % 2 == 1) v[n_ions / 2] = 0.0;
  };

  constexpr int budget = 200;
  double residual_norm = 0.0;
  for (int it = 0; it < budget; ++it) {
    const Eigen::VectorXd f = detail::force_residual(u);
    residual_norm = f.lpNorm<Eigen::Infinity>();
    if (residual_norm < tolerance) {
      symmetrize(u);
      if (detail::force_residual(u).lpNorm<Eigen::Infinity>() < tolerance) return u;
      continue;  // symmetrization nudged it above tolerance; keep iterating
    }
    Eigen::VectorXd step = mode_matrix(u).ldlt().solve(f);
    // Halve the step until the ordering survives; the mode matrix is strictly
    // diagonally dominant so the direction is always a descent direction.
    Eigen::VectorXd trial = u - step;
    int halvings = 0;
    while (!detail::strictly_increasing(trial) && halvings < 60) {
      step *= 0.5;
      trial = u - step;
      ++halvings;
    }
    if (halvings == 60)
      throw SolverError("equilibrium_positions: step damping failed", residual_norm);
    u = trial;
  }
  throw SolverError("equilibrium_positions: no convergence within 200 iterations",
                    residual_norm);
}

// Eigen-decomposition of the mode matrix together with the Bogoliubov data of
// the radial modes. Sign convention: each eigenvector is scaled so its entry
// of largest magnitude is positive (ties broken by lowest site index).
inline RadialModeSet radial_modes(const Eigen::MatrixXd& mode_mat, double alpha) {
  const int n = static_cast<int>(mode_mat.rows());
  if (n < 1 || mode_mat.cols() != n) throw DomainError("radial_modes: matrix must be square");
  if (!mode_mat.isApprox(mode_mat.transpose(), 1e-12))
    throw DomainError("radial_modes: matrix must be symmetric");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("radial_modes: need 0 < alpha < 1");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mode_mat);
  if (es.info() != Eigen::Success)
    throw SolverError("radial_modes: eigensolver failed", 0.0);

  RadialModeSet modes;
  modes.eigenvalues = es.eigenvalues();  // ascending
  modes.eigenvectors = es.eigenvectors();
  for (int p = 0; p < n; ++p) {
    int imax = 0;
    for (int k = 1; k < n; ++k)
      if (std::abs(modes.eigenvectors(k, p)) > std::abs(modes.eigenvectors(imax, p))) imax = k;
    if (modes.eigenvectors(imax, p) < 0.0) modes.eigenvectors.col(p) *= -1.0;
  }

  modes.gammas.resize(n);
  modes.thetas.resize(n);
  modes.collective_frequencies.resize(n);
  for (int p = 0; p < n; ++p) {
    const double lambda = modes.eigenvalues[p];
    double gamma = 1.0 + alpha * alpha * (1.0 - lambda) / 2.0;
    // The COM mode has lambda = 1 exactly; pin it so theta_1 = 0 exactly.
    if (std::abs(lambda - 1.0) < 1e-8) gamma = 1.0;
    if (!(gamma > 0.0))
      throw DomainError(
          "radial_modes: gamma_p <= 0 for mode p=" + std::to_string(p + 1) +
          "; the linear chain is unstable against the zig-zag transition at this alpha");
    modes.gammas[p] = gamma;
    modes.thetas[p] = gamma == 1.0 ? 0.0 : -0.25 * std::log(gamma);
    modes.collective_frequencies[p] = std::sqrt(gamma);
  }
  return modes;
}

// Site frequencies and hopping strengths for a given prefactor t = alpha*omega_z/2
// in units of g:
//   t_km    = t / |u_k - u_m|^3,
//   omega_k = -sum_{s != k} t_ks.
// omega is symmetrized across the chain center so reflection symmetry holds
// bitwise, matching the exactly antisymmetric positions.
inline IonChainGeometry site_couplings_scaled(const Eigen::VectorXd& positions,
                                              double t_scale) {
  const int n = static_cast<int>(positions.size());
  if (n < 1) throw DomainError("site_couplings: need at least one ion");
  if (!detail::strictly_increasing(positions))
    throw DomainError("site_couplings: positions must be strictly increasing");
  if (t_scale < 0.0) throw DomainError("site_couplings: hopping scale must be >= 0");

  IonChainGeometry geo;
  geo.positions = positions;
  geo.coupling_scale = t_scale;
  geo.hopping = Eigen::MatrixXd::Zero(n, n);
  geo.site_frequencies = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < n; ++k)
    for (int m = 0; m < n; ++m) {
      if (m == k) continue;
      geo.hopping(k, m) = t_scale / std::pow(std::abs(positions[k] - positions[m]), 3);
      geo.site_frequencies[k] -= geo.hopping(k, m);
    }
  for (int k = 0; k < n / 2; ++k) {
    const double avg = 0.5 * (geo.site_frequencies[k] + geo.site_frequencies[n - 1 - k]);
    geo.site_frequencies[k] = avg;
    geo.site_frequencies[n - 1 - k] = avg;
  }
  return geo;
}

inline IonChainGeometry site_couplings(const Eigen::VectorXd& positions, double alpha,
                                       double omega_z_over_g) {
  if (!(alpha > 0.0)) throw DomainError("site_couplings: alpha must be > 0");
  if (!(omega_z_over_g > 0.0)) throw DomainError("site_couplings: omega_z must be > 0");
  return site_couplings_scaled(positions, 0.5 * alpha * omega_z_over_g);
}

// Fock amplitudes c_n of a squeezed vacuum on the even states |2n>, n = 0..cutoff:
//   c_n = sqrt((2n-1)!!/(2n)!!) (tanh theta)^n / sqrt(cosh theta),
// with (-1)!! = 0!! = 1, via the ratio recurrence c_n/c_{n-1} = tanh(theta) sqrt((2n-1)/(2n)).
inline SqueezedStateAmplitudes squeezed_amplitudes(double theta, int cutoff) {
  if (cutoff < 0) throw DomainError("squeezed_amplitudes: cutoff must be >= 0");
  SqueezedStateAmplitudes sq;
  sq.theta = theta;
  sq.amplitudes.resize(cutoff + 1);
  const double th = std::tanh(theta);
  double c = 1.0 / std::sqrt(std::cosh(theta));
  double norm = 0.0;
  for (int n = 0; n <= cutoff; ++n) {
    if (n > 0) c *= th * std::sqrt((2.0 * n - 1.0) / (2.0 * n));
    sq.amplitudes[n] = c;
    norm += c * c;
  }
  sq.truncation_deficit = 1.0 - norm;
  return sq;
}

// Red-sideband tuning relation: the laser detuning that realizes a sideband
// detuning Delta is delta_L = -omega_x - Delta, and conversely.
inline double laser_detuning(double omega_x, double sideband_delta) {
  return -omega_x - sideband_delta;
}
inline double sideband_detuning(double omega_x, double laser_delta) {
  return -omega_x - laser_delta;
}

// Reduces a physical configuration to the dimensionless model, with g as the
// energy unit. Flags (without failing) parameters outside the regime
// t_km, g << omega_x where the number-conserving Hamiltonian was derived.
inline ModelParameters physical_to_model(const PhysicalTrapConfig& config) {
  config.validate();
  const double g = config.coupling();
  if (!(g > 0.0))
    throw DomainError("physical_to_model: lamb_dicke * rabi must be > 0 to use g units");

  ModelParameters model;
  model.n_ions = config.n_ions;
  model.alpha = config.anisotropy();
  const double t_phys = 0.5 * model.alpha * config.omega_z;  // rad/s
  model.t_scale = t_phys / g;
  model.delta_over_g = config.delta / g;

  double max_hop = 0.0;  // strongest pair coupling, in rad/s
  if (config.n_ions >= 2) {
    const Eigen::VectorXd u = equilibrium_positions(config.n_ions);
    for (int k = 0; k < config.n_ions; ++k)
      for (int m = k + 1; m < config.n_ions; ++m)
        max_hop = std::max(max_hop, t_phys / std::pow(std::abs(u[k] - u[m]), 3));
  }
  model.rwa_warning = (max_hop > config.omega_x / 10.0) || (g > config.omega_x / 10.0);
  return model;
}

}  // namespace ionjch
