#pragma once

// Signed g-tensor, electron Zeeman Hamiltonian and its eigenstates, plus the
// closed-form single-particle g-factor expressions (Lande, Roth).

#include <cmath>
#include <stdexcept>
#include <utility>

#include "qd/constants.hpp"
#include "qd/errors.hpp"

namespace qd {

// Splittings below this are treated as degenerate: the eigenvector phase
// convention carries no information at numerical-noise level.
inline constexpr double kDegenerateSplittingUeV = 1e-9;

// In-plane anisotropy has its principal axes pinned to [110]/[1-10]:
// g_perp(phi) = mean + (delta/2) sin(2 phi).
struct GTensor {
  double g_z = 0.0;
  double g_perp_mean = 0.0;
  double delta_g_perp = 0.0;

  GTensor() = default;
  GTensor(double gz, double gperp, double dgperp = 0.0)
      : g_z(gz), g_perp_mean(gperp), delta_g_perp(dgperp) {
    if (!std::isfinite(g_z) || !std::isfinite(g_perp_mean) ||
        !std::isfinite(delta_g_perp))
      throw std::domain_error("GTensor: components must be finite");
    if (delta_g_perp < 0.0)
      throw std::domain_error("GTensor: delta_g_perp must be >= 0");
  }

  static GTensor isotropic(double g) { return GTensor(g, g, 0.0); }

  double g_perp(double phi) const {
    return g_perp_mean + 0.5 * delta_g_perp * std::sin(2.0 * phi);
  }
};

// B in tesla; chi polar angle from [001]; phi azimuth from [100].
struct FieldConfiguration {
  double B = 0.0;
  double chi = 0.0;
  double phi = 0.0;

  FieldConfiguration() = default;
  FieldConfiguration(double b, double chi_rad, double phi_rad)
      : B(b), chi(chi_rad), phi(wrap_two_pi(phi_rad)) {
    if (!(B >= 0.0)) throw std::domain_error("FieldConfiguration: B must be >= 0");
    if (!(chi >= -1e-12 && chi <= kPi + 1e-12))
      throw std::domain_error("FieldConfiguration: chi must lie in [0, pi]");
    chi = std::clamp(chi, 0.0, kPi);
  }

  double bx() const { return B * std::sin(chi) * std::cos(phi); }
  double by() const { return B * std::sin(chi) * std::sin(phi); }
  double bz() const { return B * std::cos(chi); }
};

// One Zeeman eigenstate in the canonical form
//   |psi> = alpha e^{-i theta/2} |1> + beta e^{+i theta/2} |2>,
// alpha, beta real non-negative, alpha^2 + beta^2 = 1. The partner state of a
// doublet carries (beta, alpha, theta + pi).
struct SpinEigenpair {
  double alpha = 1.0;
  double beta = 0.0;
  double theta = 0.0;
  double splitting = 0.0;  // ueV, >= 0; same value for both doublet members

  Eigen::Vector2cd spinor() const {
    const complexd half(0.0, 0.5 * theta);
    return {alpha * std::exp(-half), beta * std::exp(half)};
  }
};

inline double zeeman_splitting(double g_z, double g_perp_at_phi,
                               const FieldConfiguration& f) {
  const double a = g_z * std::cos(f.chi);
  const double b = g_perp_at_phi * std::sin(f.chi);
  return kMuB * f.B * std::hypot(a, b);
}

inline double zeeman_splitting(const GTensor& g, const FieldConfiguration& f) {
  return zeeman_splitting(g.g_z, g.g_perp(f.phi), f);
}

// Lande factor with m_J absorbed, so the splitting is mu_B B g_l.
inline double lande_g(double S, double L, double J, double m_J) {
  const double tol = 1e-9;
  if (J <= 0.0) throw std::domain_error("lande_g: J must be positive");
  if (J < std::abs(L - S) - tol || J > L + S + tol)
    throw std::domain_error("lande_g: J outside |L-S|..L+S");
  if (std::abs(m_J) > J + tol)
    throw std::domain_error("lande_g: |m_J| must not exceed J");
  const double steps = J - std::abs(L - S);
  if (std::abs(steps - std::round(steps)) > tol)
    throw std::domain_error("lande_g: J not reachable from L and S");
  const double msteps = J - m_J;
  if (std::abs(msteps - std::round(msteps)) > tol)
    throw std::domain_error("lande_g: m_J inconsistent with J");
  return 2.0 * m_J *
         (1.0 + (J * (J + 1.0) + S * (S + 1.0) - L * (L + 1.0)) /
                    (2.0 * J * (J + 1.0)));
}

// Gamma-point conduction-band g in bulk, from interband coupling E_p,
// gap E_g and spin-orbit splitting Delta_SO (all eV).
inline double roth_g(double E_p, double E_g, double Delta_SO) {
  if (!(E_g > 0.0)) throw std::domain_error("roth_g: E_g must be positive");
  if (Delta_SO < 0.0) throw std::domain_error("roth_g: Delta_SO must be >= 0");
  return 2.0 - 2.0 * E_p * Delta_SO / (3.0 * E_g * (E_g + Delta_SO));
}

// H = 1/2 mu_B [ g_z B_z sigma_z + g_perp (B_x sigma_x + B_y sigma_y) ], ueV.
inline Matrix2c electron_hamiltonian(const GTensor& g,
                                     const FieldConfiguration& f) {
  const double gp = g.g_perp(f.phi);
  const double hz = 0.5 * kMuB * g.g_z * f.bz();
  const complexd hxy =
      0.5 * kMuB * gp * complexd(f.bx(), -f.by());
  Matrix2c h;
  h << hz, hxy, std::conj(hxy), -hz;
  return h;
}

namespace detail {

// Canonical eigenpair of a traceless 2x2 Zeeman-form Hamiltonian
//   H = (gap/2) (n_z sigma_z + n_perp (cos(az) sigma_x + sin(az) sigma_y)).
// Returns (upper state, lower state).
inline std::pair<SpinEigenpair, SpinEigenpair> canonical_doublet(
    double gz_term, double gperp_term, double azimuth, double gap_ueV,
    const char* who) {
  if (gap_ueV < kDegenerateSplittingUeV)
    throw degenerate_state_error(std::string(who) +
                                 ": doublet is degenerate at this field");
  const double c = std::hypot(gz_term, gperp_term);
  const double nz = gz_term / c;
  const double alpha = std::sqrt(0.5 * (1.0 + nz));
  const double beta = std::sqrt(0.5 * (1.0 - nz));
  double theta = azimuth;
  if (gperp_term < 0.0) theta += kPi;  // absorbs the amplitude sign
  theta = wrap_pi(theta);
  SpinEigenpair up{alpha, beta, theta, gap_ueV};
  SpinEigenpair dn{beta, alpha, wrap_pi(theta + kPi), gap_ueV};
  return {up, dn};
}

}  // namespace detail

// (|e+>, |e->) with theta = phi: the in-plane quantization axis of the
// s-like electron follows B.
inline std::pair<SpinEigenpair, SpinEigenpair> electron_eigenpair(
    const GTensor& g, const FieldConfiguration& f) {
  const double gz_term = g.g_z * std::cos(f.chi);
  const double gp_term = g.g_perp(f.phi) * std::sin(f.chi);
  const double gap = kMuB * f.B * std::hypot(gz_term, gp_term);
  return detail::canonical_doublet(gz_term, gp_term, f.phi, gap,
                                   "electron_eigenpair");
}

}  // namespace qd
