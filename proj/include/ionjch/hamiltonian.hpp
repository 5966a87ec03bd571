#pragma once

// Number-conserving Jaynes-Cummings-Hubbard Hamiltonian on a fixed-excitation
// sector, assembled as a sparse real-symmetric operator in units of g:
//
//   H = sum_k omega_k n_k + Delta sum_k |e><e|_k
//     + g sum_k (sigma^+_k a_k + sigma^-_k a_k^dag)
//     + sum_{k>m} t_km (a_k^dag a_m + a_k a_m^dag).
//
// The chemical-potential term -mu*N is a constant within a sector and is
// dropped; mu only reappears downstream as the observable mu(n) = E_g(n+1) - E_g(n).
// All couplings are real, so the operator is real-symmetric and only the upper
// triangle is stored.

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ionjch/crystal.hpp"
#include "ionjch/errors.hpp"
#include "ionjch/fockspace.hpp"
#include "ionjch/format.hpp"

namespace ionjch {

// Sparse real-symmetric matrix: unique (row, col, value) entries with
// row <= col; the lower triangle is implied.
struct SymmetricOperator {
  struct Entry {
    std::uint32_t row;
    std::uint32_t col;
    double value;
  };

  std::size_t dimension = 0;
  std::vector<Entry> entries;          // sorted by (row, col)
  std::uint64_t basis_fingerprint = 0;

  void check_basis(const SectorBasis& basis) const {
    if (basis.fingerprint() != basis_fingerprint || basis.dimension() != dimension)
      throw ConsistencyError("SymmetricOperator: built on a different basis");
  }

  std::size_t nnz_off_diagonal() const {
    std::size_t n = 0;
    for (const auto& e : entries)
      if (e.row != e.col) ++n;
    return n;
  }

  // y = H x with the symmetric completion applied.
  void apply(const double* x, double* y) const {
    std::fill(y, y + dimension, 0.0);
    for (const auto& e : entries) {
      y[e.row] += e.value * x[e.col];
      if (e.row != e.col) y[e.col] += e.value * x[e.row];
    }
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y(dimension);
    apply(x.data(), y.data());
    return y;
  }

  Eigen::MatrixXd dense() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dimension, dimension);
    for (const auto& e : entries) {
      m(e.row, e.col) = e.value;
      m(e.col, e.row) = e.value;
    }
    return m;
  }
};

struct HamiltonianSpec {
  IonChainGeometry geometry;
  double delta_over_g = 0.0;
  bool include_site_frequencies = true;
  // When set, rebuilds omega_k and t_km from the geometry's positions with
  // this alpha*omega_z/2 scale (in g units), imposing a target hopping such as
  // t = 0.3g regardless of how the geometry was first scaled.
  std::optional<double> hopping_scale_override;
};

namespace detail {

inline IonChainGeometry resolved_geometry(const HamiltonianSpec& spec) {
  if (spec.hopping_scale_override)
    return site_couplings_scaled(spec.geometry.positions, *spec.hopping_scale_override);
  return spec.geometry;
}

// truncation_cutoff < 0 means the space is excitation-complete and raises can
// never leave it (the sector case).
template <typename Space>
void assemble(const HamiltonianSpec& spec, const Space& space, int truncation_cutoff,
              SymmetricOperator& op) {
  const int n = space.n_sites();
  const IonChainGeometry geo = resolved_geometry(spec);
  const double delta = spec.delta_over_g;
  constexpr double g = ModelParameters::g;

  op.dimension = space.dimension();
  op.entries.clear();
  op.entries.reserve(space.dimension() * (1 + n + n * (n - 1) / 2));

  for (std::size_t i = 0; i < space.dimension(); ++i) {
    const auto row = static_cast<std::uint32_t>(i);
    double diag = 0.0;
    for (int k = 0; k < n; ++k) {
      if (spec.include_site_frequencies) diag += geo.site_frequencies[k] * space.phonon(i, k);
      diag += delta * space.qubit(i, k);
    }
    op.entries.push_back({row, row, diag});

    const std::uint64_t w = space.packed(i);
    for (int k = 0; k < n; ++k) {
      // sigma^+_k a_k: the image has a larger qubit word, hence a larger index.
      const int nk = space.phonon(i, k);
      if (space.qubit(i, k) == 0 && nk >= 1) {
        const std::uint64_t img =
            (w | (std::uint64_t{1} << k)) - (std::uint64_t{1} << (n + 4 * k));
        op.entries.push_back({row, static_cast<std::uint32_t>(*space.find_packed(img)),
                              g * std::sqrt(static_cast<double>(nk))});
      }
      // Move one phonon k -> m; each unordered pair of states is emitted once,
      // from its lower-index end.
      for (int m = 0; m < n; ++m) {
        if (m == k || nk == 0 || geo.hopping(k, m) == 0.0) continue;
        const int nm = space.phonon(i, m);
        if (truncation_cutoff >= 0 && nm + 1 > truncation_cutoff) continue;
        const std::uint64_t img = w - (std::uint64_t{1} << (n + 4 * k)) +
                                  (std::uint64_t{1} << (n + 4 * m));
        const auto j = *space.find_packed(img);
        if (j > i)
          op.entries.push_back({row, static_cast<std::uint32_t>(j),
                                geo.hopping(k, m) * std::sqrt(static_cast<double>(nk)) *
                                    std::sqrt(static_cast<double>(nm + 1))});
      }
    }
  }
  std::sort(op.entries.begin(), op.entries.end(), [](const auto& a, const auto& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
}

}  // namespace detail

inline SymmetricOperator build(const HamiltonianSpec& spec, const SectorBasis& basis) {
  if (spec.geometry.n_ions() != basis.n_sites())
    throw ConsistencyError("build: geometry has " +
                           std::to_string(spec.geometry.n_ions()) + " ions but basis has " +
                           std::to_string(basis.n_sites()) + " sites");
  SymmetricOperator op;
  detail::assemble(spec, basis, /*truncation_cutoff=*/-1, op);
  op.basis_fingerprint = basis.fingerprint();
  return op;
}

// Full (non-sector) product space with a per-site phonon cutoff; only used to
// audit excitation conservation, so it stays an internal fixture rather than a
// first-class basis.
class TruncatedSpace {
 public:
  TruncatedSpace(int n_sites, int cutoff, std::size_t capacity = 100000)
      : n_sites_(n_sites), cutoff_(cutoff) {
    if (n_sites < 1 || n_sites > SectorBasis::max_sites)
      throw DomainError("TruncatedSpace: unsupported site count");
    if (cutoff < 0 || cutoff > SectorBasis::max_excitations)
      throw DomainError("TruncatedSpace: unsupported cutoff");
    double dim_est = 1.0;
    for (int k = 0; k < n_sites; ++k) dim_est *= 2.0 * (cutoff + 1);
    if (dim_est > static_cast<double>(capacity))
      throw CapacityError("TruncatedSpace: full truncated space of ~" +
                          std::to_string(static_cast<std::uint64_t>(dim_est)) +
                          " states exceeds the cap " + std::to_string(capacity));

    // Lexicographic on (qubit word, phonon word), as in SectorBasis.
    for (std::uint32_t w = 0; w < (1u << n_sites); ++w) {
      std::uint64_t qubit_bits = 0;
      for (int k = 0; k < n_sites; ++k)
        if ((w >> (n_sites - 1 - k)) & 1) qubit_bits |= std::uint64_t{1} << k;
      emit(qubit_bits, 0);
    }
    index_.reserve(states_.size() * 2);
    for (std::size_t i = 0; i < states_.size(); ++i)
      index_.emplace(states_[i], static_cast<std::uint32_t>(i));
  }

  int n_sites() const { return n_sites_; }
  int cutoff() const { return cutoff_; }
  std::size_t dimension() const { return states_.size(); }
  std::uint64_t packed(std::size_t i) const { return states_[i]; }
  int qubit(std::size_t i, int site) const {
    return static_cast<int>((states_[i] >> site) & 1u);
  }
  int phonon(std::size_t i, int site) const {
    return static_cast<int>((states_[i] >> (n_sites_ + 4 * site)) & 0xfu);
  }
  int total_excitations(std::size_t i) const {
    int t = 0;
    for (int k = 0; k < n_sites_; ++k) t += qubit(i, k) + phonon(i, k);
    return t;
  }
  std::optional<std::size_t> find_packed(std::uint64_t word) const {
    const auto it = index_.find(word);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  void emit(std::uint64_t prefix, int site) {
    if (site == n_sites_) {
      states_.push_back(prefix);
      return;
    }
    for (int c = 0; c <= cutoff_; ++c)
      emit(prefix | (static_cast<std::uint64_t>(c) << (n_sites_ + 4 * site)), site + 1);
  }

  int n_sites_;
  int cutoff_;
  std::vector<std::uint64_t> states_;
  std::unordered_map<std::uint64_t, std::uint32_t> index_;
};

// The model Hamiltonian projected onto the truncated product space (raises
// past the cutoff are dropped).
inline SymmetricOperator build_truncated(const HamiltonianSpec& spec,
                                         const TruncatedSpace& space) {
  if (spec.geometry.n_ions() != space.n_sites())
    throw ConsistencyError("build_truncated: geometry/space site mismatch");
  SymmetricOperator op;
  detail::assemble(spec, space, space.cutoff(), op);
  return op;
}

inline bool excitation_block_diagonal(const SymmetricOperator& op,
                                      const TruncatedSpace& space) {
  for (const auto& e : op.entries)
    if (e.value != 0.0 &&
        space.total_excitations(e.row) != space.total_excitations(e.col))
      return false;
  return true;
}

// Builds the Hamiltonian on the full truncated space and verifies that it is
// exactly block-diagonal in the total excitation number.
inline bool conservation_check(const HamiltonianSpec& spec, int cutoff_per_site) {
  TruncatedSpace space(spec.geometry.n_ions(), cutoff_per_site);
  return excitation_block_diagonal(build_truncated(spec, space), space);
}

// Coordinate text dump: header "% N M dimension nnz", then 0-based
// "row col value" lines in (row, col) order, upper triangle only.
inline void dump_matrix(const SymmetricOperator& op, const SectorBasis& basis,
                        std::ostream& os) {
  op.check_basis(basis);
  os << "% " << basis.n_sites() << ' ' << basis.total_excitations() << ' '
     << op.dimension << ' ' << op.entries.size() << '\n';
  for (const auto& e : op.entries)
    os << e.row << ' ' << e.col << ' ' << format_double(e.value) << '\n';
}

}  // namespace ionjch
