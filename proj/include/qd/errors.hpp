#pragma once

#include <stdexcept>
#include <string>

namespace qd {

// Eigenstates requested for a (near-)degenerate doublet; the relative phase
// convention is undefined below the splitting threshold.
class degenerate_state_error : public std::runtime_error {
 public:
  explicit degenerate_state_error(const std::string& what)
      : std::runtime_error(what) {}
};

class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// A set of observations that cannot be produced by any sign configuration.
class inconsistency_error : public std::invalid_argument {
 public:
  explicit inconsistency_error(const std::string& what)
      : std::invalid_argument(what) {}
};

class unresolved_doublet_error : public std::runtime_error {
 public:
  explicit unresolved_doublet_error(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace qd
