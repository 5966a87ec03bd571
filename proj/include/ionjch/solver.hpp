#pragma once

// Lowest eigenpair of a SymmetricOperator. Two routes: a dense solve (Eigen)
// for small dimensions and a Lanczos iteration with full reorthogonalization
// for large ones. Everything is deterministic: the Krylov start vector is the
// normalized all-ones vector, breakdown recovery injects coordinate vectors in
// index order, and each converged run is re-verified from a deterministically
// perturbed vector in case the start was confined to an invariant subspace.
// The gap comes from a second run deflated against the ground vector, which is
// the only way a Krylov method can see degenerate partners.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ionjch/errors.hpp"
#include "ionjch/hamiltonian.hpp"

namespace ionjch {

enum class SolveMethod { automatic, dense, iterative };

struct SolverInfo {
  int iterations = 0;       // matrix-vector products (0 for the dense route)
  double residual = 0.0;    // ||H v - E v||_2, computed explicitly
};

struct GroundStateResult {
  double energy = 0.0;          // E_0 in units of g
  Eigen::VectorXd vector;       // unit norm; largest-magnitude entry positive
  double gap = 0.0;             // E_1 - E_0 (0 for one-dimensional operators)
  bool degenerate = false;      // gap < 1e-8 * max(1, |E_0|)
  SolverInfo info;
};

namespace detail {

inline void fix_global_sign(Eigen::VectorXd& v) {
  int imax = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i)
    if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
  if (v[imax] < 0.0) v = -v;
}

struct LanczosOutcome {
  double theta0 = 0.0;
  double theta1 = 0.0;
  Eigen::VectorXd vector;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

// One Lanczos run (with restarts) from the given start vector. Converges the
// lowest Ritz pair to rel_tol and the second Ritz value far enough for a gap
// estimate. max_cycles restarts, then gives up with converged = false. When
// deflate vectors are given the iteration is confined to their orthogonal
// complement, which turns the run into a solver for the next eigenvalue up.
inline LanczosOutcome lanczos_lowest(const SymmetricOperator& op,
                                     Eigen::VectorXd start, double rel_tol,
                                     int max_cycles,
                                     const std::vector<Eigen::VectorXd>* deflate = nullptr) {
  const auto dim = static_cast<Eigen::Index>(op.dimension);
  const int max_krylov = static_cast<int>(std::min<Eigen::Index>(dim, 250));
  LanczosOutcome out;

  const auto project_out_deflated = [&](Eigen::VectorXd& v) {
    if (!deflate) return;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& d : *deflate) v -= d.dot(v) * d;
  };

  project_out_deflated(start);
  if (!(start.norm() > 1e-8)) {
    // Start was (numerically) inside the deflated span; take the first
    // coordinate direction with a usable complement component.
    for (Eigen::Index i = 0; i < dim; ++i) {
      Eigen::VectorXd cand = Eigen::VectorXd::Unit(dim, i);
      project_out_deflated(cand);
      if (cand.norm() > 1e-6) {
        start = cand;
        break;
      }
    }
  }
  start.normalize();
  const int effective_dim =
      static_cast<int>(dim) - static_cast<int>(deflate ? deflate->size() : 0);
  double scale = 1.0;  // running estimate of ||H||
  int next_injection = 0;
  const double eps = std::numeric_limits<double>::epsilon();

  for (int cycle = 0; cycle < max_cycles; ++cycle) {
    std::vector<Eigen::VectorXd> basis;
    basis.reserve(max_krylov);
    std::vector<double> alpha, beta;  // tridiagonal; beta[j] couples j and j+1
    basis.push_back(start);

    Eigen::VectorXd w(dim);
    for (int j = 0; j < max_krylov; ++j) {
      op.apply(basis[j].data(), w.data());
      ++out.iterations;
      const double a = basis[j].dot(w);
      alpha.push_back(a);
      w -= a * basis[j];
      if (j > 0) w -= beta[j - 1] * basis[j - 1];
      project_out_deflated(w);
      for (int pass = 0; pass < 2; ++pass)  // full reorthogonalization
        for (const auto& v : basis) w -= v.dot(w) * v;

      scale = std::max(scale, std::abs(a));
      double b = w.norm();
      const int krylov_dim = j + 1;
      const bool exhausted = krylov_dim >= effective_dim;
      const bool cycle_end = krylov_dim == max_krylov;
      const bool breakdown = b < 1e-13 * scale;

      if (exhausted || cycle_end || breakdown || krylov_dim % 4 == 0) {
        Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(krylov_dim, krylov_dim);
        for (int r = 0; r < krylov_dim; ++r) {
          tri(r, r) = alpha[r];
          if (r + 1 < krylov_dim) tri(r, r + 1) = tri(r + 1, r) = beta[r];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tes(tri);
        const double theta0 = tes.eigenvalues()[0];
        const double tol0 = std::max(rel_tol * std::max(1.0, std::abs(theta0)),
                                     32.0 * eps * scale);
        const double bound0 = b * std::abs(tes.eigenvectors()(krylov_dim - 1, 0));
        const double theta1 = krylov_dim >= 2 ? tes.eigenvalues()[1] : theta0;
        const double bound1 =
            krylov_dim >= 2 ? b * std::abs(tes.eigenvectors()(krylov_dim - 1, 1)) : 0.0;
        const bool ritz_ok =
            bound0 <= tol0 &&
            (effective_dim < 2 || krylov_dim < 2 ||
             bound1 <= std::max(1e-6 * std::max(1.0, std::abs(theta1)), 32.0 * eps * scale));

        if (ritz_ok || exhausted || cycle_end) {
          Eigen::VectorXd y = Eigen::VectorXd::Zero(dim);
          for (int r = 0; r < krylov_dim; ++r) y += tes.eigenvectors()(r, 0) * basis[r];
          y.normalize();
          const double res = (op.apply(y) - theta0 * y).norm();
          // Keep the best approximation seen so far; restarts resume from it.
          if (!out.converged && (out.vector.size() == 0 || theta0 <= out.theta0)) {
            out.theta0 = theta0;
            out.theta1 = theta1;
            out.vector = y;
            out.residual = res;
          }
          if ((ritz_ok && res <= std::max(tol0, 64.0 * eps * scale)) || exhausted) {
            out.theta0 = theta0;
            out.theta1 = theta1;
            out.vector = std::move(y);
            out.residual = res;
            out.converged = true;
            return out;
          }
        }
      }

      if (cycle_end) break;
      if (breakdown) {
        // Invariant subspace hit before exhausting the matrix: bring in the
        // next coordinate direction not already represented.
        bool replaced = false;
        while (next_injection < static_cast<int>(dim)) {
          Eigen::VectorXd cand = Eigen::VectorXd::Zero(dim);
          cand[next_injection++] = 1.0;
          project_out_deflated(cand);
          for (int pass = 0; pass < 2; ++pass)
            for (const auto& v : basis) cand -= v.dot(cand) * v;
          if (cand.norm() > 1e-6) {
            w = cand;
            b = w.norm();
            replaced = true;
            break;
          }
        }
        if (!replaced) break;   // the whole space is spanned
        beta.push_back(0.0);    // decoupled tridiagonal block
        basis.push_back(w / b);
        continue;
      }
      beta.push_back(b);
      basis.push_back(w / b);
    }

    if (out.vector.size() == dim) start = out.vector;
    start.normalize();
  }
  return out;
}

// Lanczos minimum with verification restarts: after convergence, re-run from a
// deterministically perturbed vector and adopt the outcome only if it is
// strictly lower. Guards against a start vector (or an entire converged
// eigenpair) confined to an invariant subspace above the true minimum.
inline LanczosOutcome lanczos_min_verified(const SymmetricOperator& op,
                                           const Eigen::VectorXd& initial,
                                           double rel_tol,
                                           const std::vector<Eigen::VectorXd>* deflate) {
  auto best = lanczos_lowest(op, initial, rel_tol, 40, deflate);
  if (!best.converged)
    throw SolverError("lanczos: no convergence within the restart budget",
                      best.residual);
  for (int round = 0; round < 3; ++round) {
    Eigen::VectorXd probe(op.dimension);
    for (std::size_t i = 0; i < op.dimension; ++i)
      probe[i] = std::sin(static_cast<double>(i) + 1.0 + round);
    probe -= best.vector.dot(probe) * best.vector;
    if (deflate)
      for (const auto& d : *deflate) probe -= d.dot(probe) * d;
    if (probe.norm() < 1e-8) continue;
    Eigen::VectorXd start = best.vector + 1e-3 * probe.normalized();
    auto check = lanczos_lowest(op, start, rel_tol, 40, deflate);
    const int spent = best.iterations + check.iterations;
    if (check.converged &&
        check.theta0 < best.theta0 - 1e-10 * std::max(1.0, std::abs(best.theta0))) {
      best = check;
      best.iterations = spent;
      continue;
    }
    if (check.converged) best.theta1 = std::min(best.theta1, check.theta1);
    best.iterations = spent;
    break;
  }
  return best;
}

inline GroundStateResult dense_ground_state(const SymmetricOperator& op) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.dense());
  if (es.info() != Eigen::Success)
    throw SolverError("ground_state: dense eigensolver failed", 0.0);
  GroundStateResult result;
  result.energy = es.eigenvalues()[0];
  result.vector = es.eigenvectors().col(0);
  result.vector.normalize();
  result.gap = op.dimension >= 2 ? es.eigenvalues()[1] - es.eigenvalues()[0] : 0.0;
  result.info.iterations = 0;
  return result;
}

}  // namespace detail

inline GroundStateResult ground_state(const SymmetricOperator& op,
                                      SolveMethod method = SolveMethod::automatic) {
  if (op.dimension == 0) throw DomainError("ground_state: empty operator");
  if (method == SolveMethod::automatic)
    method = op.dimension < 2000 ? SolveMethod::dense : SolveMethod::iterative;

  GroundStateResult result;
  if (op.dimension == 1) {
    result.energy = op.entries.empty() ? 0.0 : op.entries.front().value;
    result.vector = Eigen::VectorXd::Ones(1);
    result.gap = 0.0;
    result.degenerate = false;
    result.info.residual = 0.0;
    return result;
  }

  if (method == SolveMethod::dense) {
    result = detail::dense_ground_state(op);
  } else {
    constexpr double rel_tol = 1e-9;
    const auto best = detail::lanczos_min_verified(
        op, Eigen::VectorXd::Ones(op.dimension), rel_tol, nullptr);
    result.energy = best.theta0;
    result.vector = best.vector;
    result.info.iterations = best.iterations;
    // Gap by deflation: the lowest eigenvalue orthogonal to the ground vector
    // is E_1 itself, degenerate partners included, which a single Krylov run
    // cannot see (its space has one dimension per distinct eigenvalue). The
    // start mixes the all-ones vector with an asymmetric one so it overlaps
    // every symmetry sector of the operator.
    const std::vector<Eigen::VectorXd> deflate{best.vector};
    Eigen::VectorXd gap_start(op.dimension);
    for (std::size_t i = 0; i < op.dimension; ++i)
      gap_start[i] = 1.0 + 0.5 * std::sin(static_cast<double>(i) + 1.0);
    const auto second = detail::lanczos_min_verified(op, gap_start, rel_tol, &deflate);
    result.info.iterations += second.iterations;
    result.gap = std::max(0.0, std::min(best.theta1, second.theta0) - best.theta0);
  }

  detail::fix_global_sign(result.vector);
  result.info.residual = (op.apply(result.vector) - result.energy * result.vector).norm();
  result.degenerate =
      op.dimension >= 2 && result.gap < 1e-8 * std::max(1.0, std::abs(result.energy));
  return result;
}

}  // namespace ionjch
