#pragma once

// Heavy-hole pseudo-spin response to an in-plane field. Three effective
// interactions contribute: a third-order correction from the isotropic
// Zeeman term, the direct anisotropic (non-Zeeman) term, and HH-LH coupling.
// All matrices act on the valence-band pseudo-spin basis
// (|up>(X-iY), -|dn>(X+iY)) in the electron picture; the trion level ladder
// is the negative of this valence spectrum (the higher trion level is the
// one whose valence state is left empty at lower energy).

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qd/constants.hpp"
#include "qd/errors.hpp"
#include "qd/spin.hpp"

namespace qd {

enum class MixingKind { third_order_zeeman, non_zeeman_q, hh_lh_t };

struct HoleMixingParameters {
  double kappa = 1.28;         // isotropic Luttinger Zeeman constant
  double q_eff = 0.12;         // effective anisotropic constant (QD-enhanced)
  double t_eff = 0.0;          // HH-LH coupling constant
  double delta_lh = 3101.75;   // HH-LH splitting, ueV

  HoleMixingParameters() = default;
  HoleMixingParameters(double kappa_, double q_, double t_, double dlh_ueV)
      : kappa(kappa_), q_eff(q_), t_eff(t_), delta_lh(dlh_ueV) {
    if (!(delta_lh > 0.0))
      throw std::domain_error("HoleMixingParameters: Delta_LH must be > 0");
    if (!std::isfinite(kappa) || !std::isfinite(q_eff) || !std::isfinite(t_eff))
      throw std::domain_error("HoleMixingParameters: values must be finite");
  }
};

namespace detail {
// c * (sigma_x cos(a) + sigma_y sin(a))
inline Matrix2c inplane_matrix(double c, double a) {
  Matrix2c m;
  const complexd off = c * std::exp(complexd(0.0, -a));
  m << 0.0, off, std::conj(off), 0.0;
  return m;
}
}  // namespace detail

// Literal effective matrix of one interaction term, ueV.
inline Matrix2c mixing_term(MixingKind kind, double B, double phi,
                            const HoleMixingParameters& p) {
  if (!(B >= 0.0)) throw std::domain_error("mixing_term: B must be >= 0");
  switch (kind) {
    case MixingKind::third_order_zeeman: {
      const double x = kMuB * p.kappa * B;
      const double c = 1.5 * x * x * x / (p.delta_lh * p.delta_lh);
      // c [sigma_x cos(3 phi) + sigma_y sin(3 phi)]
      return detail::inplane_matrix(c, 3.0 * phi);
    }
    case MixingKind::non_zeeman_q: {
      const double c = -0.75 * p.q_eff * kMuB * B;
      // c [sigma_x cos(phi) - sigma_y sin(phi)]
      return detail::inplane_matrix(c, -phi);
    }
    case MixingKind::hh_lh_t: {
      const double c = -1.5 * kMuB * B * p.t_eff;
      // c [sigma_x sin(phi) - sigma_y cos(phi)]
      return detail::inplane_matrix(c, phi - 0.5 * kPi);
    }
  }
  throw std::invalid_argument("mixing_term: unknown kind");
}

inline const std::vector<MixingKind>& all_mixing_kinds() {
  static const std::vector<MixingKind> kinds = {MixingKind::third_order_zeeman,
                                                MixingKind::non_zeeman_q,
                                                MixingKind::hh_lh_t};
  return kinds;
}

// Sum of the enabled terms. An empty set gives the zero matrix.
inline Matrix2c hole_effective_hamiltonian(double B, double phi,
                                           const HoleMixingParameters& p,
                                           const std::vector<MixingKind>& enabled) {
  Matrix2c h = Matrix2c::Zero();
  for (MixingKind k : enabled) h += mixing_term(k, B, phi, p);
  return h;
}

struct TrionResponse {
  double g_t = 0.0;    // eigen-gap / (mu_B B), >= 0
  double theta = 0.0;  // relative phase of the upper *trion* state
};

namespace detail {

// Doublet of a purely in-plane 2x2 Hamiltonian, upper state first.
inline std::pair<SpinEigenpair, SpinEigenpair> inplane_doublet(
    const Matrix2c& h, const char* who) {
  const complexd off = h(0, 1);
  const double gap = 2.0 * std::abs(off);
  if (gap < kDegenerateSplittingUeV)
    throw degenerate_state_error(std::string(who) + ": zero in-plane gap");
  // h = |off| (cos(az) sigma_x + sin(az) sigma_y), az = -arg(off)
  const double az = -std::arg(off);
  return canonical_doublet(0.0, 1.0, az, gap, who);
}

}  // namespace detail

// In-plane trion g magnitude and the relative phase theta of the upper trion
// state. Note the single-term branches: a dominant non-Zeeman term gives
// theta = -phi here; the HH-LH and third-order terms place their commonly
// quoted phases (phi + pi/2, 3 phi) on the partner (lower) trion state.
inline TrionResponse trion_inplane_response(double B, double phi,
                                            const HoleMixingParameters& p,
                                            const std::vector<MixingKind>& enabled) {
  if (!(B > 0.0))
    throw degenerate_state_error("trion_inplane_response: B must be > 0");
  const Matrix2c h_val = hole_effective_hamiltonian(B, phi, p, enabled);
  const Matrix2c h_trion = -h_val;
  auto [upper, lower] = detail::inplane_doublet(h_trion, "trion_inplane_response");
  (void)lower;
  return {upper.splitting / (kMuB * B), upper.theta};
}

struct AnisotropyRow {
  double phi;
  double g_t;
  double theta;
};

struct AnisotropyScan {
  std::vector<AnisotropyRow> rows;
  double g_max = 0.0;
  double g_min = 0.0;
  double delta_g = 0.0;
  double phi_at_max = 0.0;
  double phi_at_min = 0.0;
};

inline AnisotropyScan anisotropy_scan(double B, const HoleMixingParameters& p,
                                      const std::vector<MixingKind>& enabled,
                                      int n_phi) {
  if (n_phi < 8) throw std::domain_error("anisotropy_scan: n_phi must be >= 8");
  AnisotropyScan out;
  out.rows.reserve(static_cast<size_t>(n_phi));
  for (int i = 0; i < n_phi; ++i) {
    const double phi = 2.0 * kPi * i / n_phi;
    const TrionResponse r = trion_inplane_response(B, phi, p, enabled);
    out.rows.push_back({phi, r.g_t, r.theta});
    if (i == 0 || r.g_t > out.g_max) {
      out.g_max = r.g_t;
      out.phi_at_max = phi;
    }
    if (i == 0 || r.g_t < out.g_min) {
      out.g_min = r.g_t;
      out.phi_at_min = phi;
    }
  }
  out.delta_g = out.g_max - out.g_min;
  return out;
}

// Dominant term by eigen-gap contribution; ties resolve in declaration order
// (third_order_zeeman, non_zeeman_q, hh_lh_t).
inline MixingKind regime_classify(double B, const HoleMixingParameters& p) {
  if (!(B > 0.0)) throw std::domain_error("regime_classify: B must be > 0");
  MixingKind best = MixingKind::third_order_zeeman;
  double best_gap = -1.0;
  for (MixingKind k : all_mixing_kinds()) {
    const Matrix2c m = mixing_term(k, B, 0.0, p);
    const double gap = 2.0 * std::abs(m(0, 1));
    if (gap > best_gap) {  // ties keep the earlier kind
      best = k;
      best_gap = gap;
    }
  }
  return best;
}

}  // namespace qd
