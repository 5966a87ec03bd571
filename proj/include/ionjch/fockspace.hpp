#pragma once

// Fixed-excitation sector of the joint qubit-phonon Hilbert space. The model
// Hamiltonian conserves the total excitation number sum_k (n_k + s_k), so each
// sector (N sites, M excitations) is enumerated exactly: per-site phonon
// occupancy is bounded by M and no truncation error exists.
//
// States are stored as packed 64-bit words (1 bit per qubit, 4 bits per phonon
// count: bit k is s_{k+1}, bits [N+4k, N+4k+4) are n_{k+1}), which caps chains
// at 12 sites and sectors at 15 excitations. Enumeration order is
// lexicographic on (qubit word, phonon word), s_1 and n_1 compared first.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "ionjch/errors.hpp"
#include "ionjch/version.hpp"

namespace ionjch {

struct SiteConfiguration {
  std::vector<std::uint8_t> qubits;   // s_k in {0,1}
  std::vector<std::uint8_t> phonons;  // n_k

  int total() const {
    int t = 0;
    for (std::size_t k = 0; k < qubits.size(); ++k) t += qubits[k] + phonons[k];
    return t;
  }
};

inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / i;
  return r;
}

// Closed-form sector dimension: sum_q C(N,q) * C(M-q+N-1, N-1).
inline std::uint64_t sector_dimension(int n_sites, int total_excitations) {
  std::uint64_t dim = 0;
  for (int q = 0; q <= std::min(n_sites, total_excitations); ++q)
    dim += binomial(n_sites, q) *
           binomial(total_excitations - q + n_sites - 1, n_sites - 1);
  return dim;
}

class SectorBasis {
 public:
  static constexpr std::size_t default_capacity = 5'000'000;
  static constexpr int max_sites = 12;        // packed-word limit
  static constexpr int max_excitations = 15;  // 4-bit phonon fields

  SectorBasis(int n_sites, int total_excitations,
              std::size_t capacity = default_capacity)
      : n_sites_(n_sites), total_(total_excitations) {
    if (n_sites < 1) throw DomainError("SectorBasis: n_sites must be >= 1");
    if (total_excitations < 0)
      throw DomainError("SectorBasis: total_excitations must be >= 0");
    if (n_sites > max_sites)
      throw CapacityError("SectorBasis: packed-word layout supports at most " +
                          std::to_string(max_sites) + " sites");
    if (total_excitations > max_excitations)
      throw CapacityError("SectorBasis: packed-word layout supports at most " +
                          std::to_string(max_excitations) + " excitations");
    const std::uint64_t dim = sector_dimension(n_sites, total_excitations);
    if (dim > capacity)
      throw CapacityError("SectorBasis: sector dimension " + std::to_string(dim) +
                          " exceeds the capacity cap " + std::to_string(capacity));

    states_.reserve(dim);
    // Qubit words ascending = lexicographic with s_1 as the leading digit.
    for (std::uint32_t w = 0; w < (1u << n_sites); ++w) {
      int q = 0;
      std::uint64_t qubit_bits = 0;
      for (int k = 0; k < n_sites; ++k) {
        const int bit = (w >> (n_sites - 1 - k)) & 1;
        q += bit;
        if (bit) qubit_bits |= std::uint64_t{1} << k;
      }
      if (q > total_excitations) continue;
      emit_compositions(qubit_bits, 0, total_excitations - q);
    }
    index_.reserve(states_.size() * 2);
    for (std::size_t i = 0; i < states_.size(); ++i)
      index_.emplace(states_[i], static_cast<std::uint32_t>(i));
  }

  int n_sites() const { return n_sites_; }
  int total_excitations() const { return total_; }
  std::size_t dimension() const { return states_.size(); }

  // Hash of (N, M, enumeration-order version); stamped into every operator
  // and dump built on this basis.
  std::uint64_t fingerprint() const {
    std::uint64_t h = 14695981039346656037ull;  // FNV-1a
    auto mix = [&h](std::uint64_t v) {
      for (int b = 0; b < 8; ++b) {
        h ^= (v >> (8 * b)) & 0xff;
        h *= 1099511628211ull;
      }
    };
    mix(static_cast<std::uint64_t>(n_sites_));
    mix(static_cast<std::uint64_t>(total_));
    mix(basis_ordering_version);
    return h;
  }

  std::uint64_t packed(std::size_t i) const { return states_[i]; }

  int qubit(std::size_t i, int site) const {
    return static_cast<int>((states_[i] >> site) & 1u);
  }
  int phonon(std::size_t i, int site) const {
    return static_cast<int>((states_[i] >> (n_sites_ + 4 * site)) & 0xfu);
  }

  SiteConfiguration state(std::size_t i) const {
    SiteConfiguration c;
    c.qubits.resize(n_sites_);
    c.phonons.resize(n_sites_);
    for (int k = 0; k < n_sites_; ++k) {
      c.qubits[k] = static_cast<std::uint8_t>(qubit(i, k));
      c.phonons[k] = static_cast<std::uint8_t>(phonon(i, k));
    }
    return c;
  }

  std::uint64_t pack(const SiteConfiguration& c) const {
    std::uint64_t w = 0;
    for (int k = 0; k < n_sites_; ++k) {
      if (c.qubits[k]) w |= std::uint64_t{1} << k;
      w |= static_cast<std::uint64_t>(c.phonons[k]) << (n_sites_ + 4 * k);
    }
    return w;
  }

  std::optional<std::size_t> find_packed(std::uint64_t word) const {
    const auto it = index_.find(word);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t index(const SiteConfiguration& c) const {
    if (static_cast<int>(c.qubits.size()) != n_sites_ ||
        static_cast<int>(c.phonons.size()) != n_sites_)
      throw ConsistencyError("SectorBasis::index: wrong number of sites");
    const auto found = find_packed(pack(c));
    if (!found)
      throw DomainError("SectorBasis::index: configuration is not in this sector");
    return *found;
  }

 private:
  // Compositions of `remaining` into the sites from `site` on, n_site ascending
  // first, appended onto the fixed qubit prefix.
  void emit_compositions(std::uint64_t prefix, int site, int remaining) {
    if (site == n_sites_ - 1) {
      states_.push_back(prefix |
                        (static_cast<std::uint64_t>(remaining) << (n_sites_ + 4 * site)));
      return;
    }
    for (int c = 0; c <= remaining; ++c)
      emit_compositions(prefix | (static_cast<std::uint64_t>(c) << (n_sites_ + 4 * site)),
                        site + 1, remaining - c);
  }

  int n_sites_;
  int total_;
  std::vector<std::uint64_t> states_;
  std::unordered_map<std::uint64_t, std::uint32_t> index_;
};

// One nonzero of a ladder-operator action: |target> += factor |source>.
struct LadderEntry {
  std::uint32_t source;
  std::uint32_t target;
  double factor;
};

enum class LadderKind {
  qubit_raise_phonon_lower,  // sigma^+_k a_k        (factor sqrt(n_k))
  qubit_lower_phonon_raise,  // sigma^-_k a_k^dag    (factor sqrt(n_k + 1))
  hop,                       // a_to^dag a_from      (factor sqrt(n_from) sqrt(n_to + 1))
};

// Sparse action table of an excitation-conserving ladder operator on a sector.
// Annihilated states (Fock vacuum, saturated qubit) simply produce no entry.
// For hop, `site` is the source and `site_to` the destination of the phonon.
inline std::vector<LadderEntry> apply_ladder(const SectorBasis& basis, LadderKind kind,
                                             int site, int site_to = -1) {
  const int n = basis.n_sites();
  if (site < 0 || site >= n) throw DomainError("apply_ladder: site out of range");
  if (kind == LadderKind::hop) {
    if (site_to < 0 || site_to >= n || site_to == site)
      throw DomainError("apply_ladder: hop needs two distinct sites");
  }

  std::vector<LadderEntry> table;
  const std::uint64_t qbit = std::uint64_t{1} << site;
  for (std::size_t i = 0; i < basis.dimension(); ++i) {
    const std::uint64_t w = basis.packed(i);
    switch (kind) {
      case LadderKind::qubit_raise_phonon_lower: {
        const int nk = basis.phonon(i, site);
        if ((w & qbit) != 0 || nk == 0) break;  // saturated qubit or phonon vacuum
        const std::uint64_t img =
            (w | qbit) - (std::uint64_t{1} << (n + 4 * site));
        table.push_back({static_cast<std::uint32_t>(i),
                         static_cast<std::uint32_t>(*basis.find_packed(img)),
                         std::sqrt(static_cast<double>(nk))});
        break;
      }
      case LadderKind::qubit_lower_phonon_raise: {
        const int nk = basis.phonon(i, site);
        if ((w & qbit) == 0) break;
        const std::uint64_t img =
            (w & ~qbit) + (std::uint64_t{1} << (n + 4 * site));
        table.push_back({static_cast<std::uint32_t>(i),
                         static_cast<std::uint32_t>(*basis.find_packed(img)),
                         std::sqrt(static_cast<double>(nk + 1))});
        break;
      }
      case LadderKind::hop: {
        const int nfrom = basis.phonon(i, site);
        if (nfrom == 0) break;
        const int nto = basis.phonon(i, site_to);
        const std::uint64_t img = w - (std::uint64_t{1} << (n + 4 * site)) +
                                  (std::uint64_t{1} << (n + 4 * site_to));
        table.push_back({static_cast<std::uint32_t>(i),
                         static_cast<std::uint32_t>(*basis.find_packed(img)),
                         std::sqrt(static_cast<double>(nfrom)) *
                             std::sqrt(static_cast<double>(nto + 1))});
        break;
      }
    }
  }
  return table;
}

// Text dump: header "N M dimension", then one configuration per line,
// "s_1 .. s_N | n_1 .. n_N", in basis order.
inline void dump_basis(const SectorBasis& basis, std::ostream& os) {
  os << basis.n_sites() << ' ' << basis.total_excitations() << ' '
     << basis.dimension() << '\n';
  for (std::size_t i = 0; i < basis.dimension(); ++i) {
    for (int k = 0; k < basis.n_sites(); ++k) os << basis.qubit(i, k) << ' ';
    os << '|';
    for (int k = 0; k < basis.n_sites(); ++k) os << ' ' << basis.phonon(i, k);
    os << '\n';
  }
}

}  // namespace ionjch
