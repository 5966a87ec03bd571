#pragma once

#include <stdexcept>
#include <string>

namespace ionjch {

// Invalid physical or combinatorial input (bad trap parameters, unstable
// chain, duplicate positions, ...).
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// A requested basis or truncated space exceeds the configured size cap.
class CapacityError : public DomainError {
 public:
  explicit CapacityError(const std::string& what) : DomainError(what) {}
};

// Two objects that must describe the same system do not (dimension or
// fingerprint mismatch).
class ConsistencyError : public DomainError {
 public:
  explicit ConsistencyError(const std::string& what) : DomainError(what) {}
};

// An iterative scheme exhausted its budget; carries the last residual.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace ionjch
