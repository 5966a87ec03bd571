#pragma once

namespace ionjch {

inline constexpr const char* version = "0.1.0";

// Bumped whenever the sector enumeration order or the packed-word layout
// changes; feeds the basis fingerprint so stale dumps are detectable.
inline constexpr unsigned basis_ordering_version = 1;

}  // namespace ionjch
