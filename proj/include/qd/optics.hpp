#pragma once

// Optical transition dipoles between electron and trion doublets, their
// Stokes vectors, transition energies and selection rules. Everything is
// computed in the electron picture: the "hole" spinor entering a matrix
// element is the valence-band state left empty by the trion, and the trion
// level ladder is the negative of the valence spectrum.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "qd/constants.hpp"
#include "qd/errors.hpp"
#include "qd/holemix.hpp"
#include "qd/spin.hpp"

namespace qd {

struct StokesVector {
  double s0 = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
  double s3 = 0.0;

  bool dark() const { return s0 <= 0.0; }
  double dop() const {
    return dark() ? 0.0 : std::sqrt(s1 * s1 + s2 * s2 + s3 * s3) / s0;
  }
  // axis of the linear component, measured from B_perp, in [0, pi)
  double linear_axis() const { return wrap_axis(0.5 * std::atan2(s2, s1)); }
};

enum class GroundSpin { up, down };  // electron spin along B

inline char ground_spin_char(GroundSpin s) {
  return s == GroundSpin::up ? 'u' : 'd';
}

// Dipole amplitude <psi_e| V(phi, alpha) |psi_h> with <S|p_x|X> = <S|p_y|Y>
// normalized to 1. alpha_pol is the linear-polarization angle from B_perp.
inline complexd dipole_matrix_element(const SpinEigenpair& e_state,
                                      const SpinEigenpair& h_state, double phi,
                                      double alpha_pol) {
  const double u = phi + alpha_pol;
  const complexd half_rel(0.0, 0.5 * (e_state.theta - h_state.theta));
  const complexd lab(0.0, u);
  return e_state.alpha * h_state.alpha * std::exp(half_rel) * std::exp(lab) -
         e_state.beta * h_state.beta * std::exp(-half_rel) * std::exp(-lab);
}

// |M|^2 for the four (electron i, hole k) combinations; rows are the electron
// index (+,-), columns the hole index (+,-).
inline Eigen::Matrix2d transition_rates(
    const std::pair<SpinEigenpair, SpinEigenpair>& e_pair,
    const std::pair<SpinEigenpair, SpinEigenpair>& h_pair, double phi,
    double alpha_pol) {
  Eigen::Matrix2d r;
  const std::array<const SpinEigenpair*, 2> es = {&e_pair.first, &e_pair.second};
  const std::array<const SpinEigenpair*, 2> hs = {&h_pair.first, &h_pair.second};
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k)
      r(i, k) = std::norm(dipole_matrix_element(*es[i], *hs[k], phi, alpha_pol));
  return r;
}

// Voigt closed form for one doublet pair: same-index rates go as
// sin^2(3 phi/2 + alpha - theta/2), cross-index as cos^2 of the same
// argument, with theta the relative phase of the upper trion state.
inline double voigt_rate_closed_form(double phi, double alpha_pol, double theta,
                                     bool same_index) {
  const double arg = 1.5 * phi + alpha_pol - 0.5 * theta;
  const double s = std::sin(arg);
  return same_index ? s * s : 1.0 - s * s;
}

inline StokesVector stokes_from_amplitudes(complexd m_alpha0, complexd m_alpha90) {
  const double p0 = std::norm(m_alpha0);
  const double p90 = std::norm(m_alpha90);
  if (p0 == 0.0 && p90 == 0.0) return {};  // dark transition
  const complexd cross = m_alpha0 * std::conj(m_alpha90);
  return {p0 + p90, p0 - p90, 2.0 * cross.real(), -2.0 * cross.imag()};
}

struct EnergyLadder {
  std::array<double, 4> energies;      // ascending, ueV
  std::array<GroundSpin, 4> ground_spin;
};

// Four transition energies from the center frequency and the two splittings
// (all ueV, splittings >= 0), relabeled ascending. Ground-spin labels follow
// the positive-g level diagram: the upper electron state is spin-up along B.
inline EnergyLadder transition_energies(double omega_center, double omega_e,
                                        double omega_t) {
  if (omega_e < 0.0 || omega_t < 0.0)
    throw std::domain_error("transition_energies: splittings must be >= 0");
  // (electron level, trion level) -> energy; upper electron = up for g > 0
  struct Line {
    double en;
    GroundSpin gs;
  };
  std::array<Line, 4> lines = {{
      {omega_center - 0.5 * omega_t - 0.5 * omega_e, GroundSpin::up},
      {omega_center - 0.5 * omega_t + 0.5 * omega_e, GroundSpin::down},
      {omega_center + 0.5 * omega_t - 0.5 * omega_e, GroundSpin::up},
      {omega_center + 0.5 * omega_t + 0.5 * omega_e, GroundSpin::down},
  }};
  std::stable_sort(lines.begin(), lines.end(),
                   [](const Line& a, const Line& b) { return a.en < b.en; });
  EnergyLadder out;
  for (int i = 0; i < 4; ++i) {
    out.energies[i] = lines[i].en;
    out.ground_spin[i] = lines[i].gs;
  }
  return out;
}

// TDM axis angles from the x axis in the Voigt configuration.
// Equal in-plane g signs put s_{1,4} on -phi; opposite signs swap the pair.
struct TdmAngles {
  double beta1;  // axis of s_1 = s_4, in [0, pi)
  double beta2;  // axis of s_2 = s_3
};

inline TdmAngles voigt_tdm_angles(int sign_e, int sign_t, double phi) {
  if (sign_e == 0 || sign_t == 0)
    throw std::domain_error("voigt_tdm_angles: signs must be nonzero");
  const bool same = (sign_e > 0) == (sign_t > 0);
  const double b1 = same ? -phi : -phi + 0.5 * kPi;
  return {wrap_axis(b1), wrap_axis(b1 + 0.5 * kPi)};
}

// Faraday selection rules: equal out-of-plane g signs leave only the inner
// pair E2, E3 dipole-allowed, opposite signs only E1, E4; the two bright
// lines carry opposite circular handedness.
struct FaradayBrightPair {
  std::array<int, 2> bright;      // 1-based transition labels, ascending
  std::array<int, 2> handedness;  // +1 = sigma+, -1 = sigma-, same order
};

inline FaradayBrightPair faraday_bright_pair(int sign_gz_e, int sign_gz_t) {
  if (sign_gz_e == 0 || sign_gz_t == 0)
    throw std::domain_error("faraday_bright_pair: signs must be nonzero");
  const bool same = (sign_gz_e > 0) == (sign_gz_t > 0);
  // Handedness of the lower bright line; for the same-sign (inner) pair this
  // assumes the usual ordering omega_t > omega_e.
  const int lower_hand = sign_gz_t > 0 ? -1 : +1;
  if (same) return {{2, 3}, {lower_hand, -lower_hand}};
  return {{1, 4}, {lower_hand, -lower_hand}};
}

// Upper bound on the optically visible spin-bright LH admixture from the
// measured axis ratio of the elliptical polarization.
inline double visible_lh_bound(double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw std::domain_error("visible_lh_bound: epsilon must be in (0, 1]");
  const double s = std::sqrt(epsilon);
  const double num = (1.0 - s) * (1.0 - s);
  const double den = (1.0 + s) * (1.0 + s);
  return 3.0 * num / den;
}

struct Cyclicity {
  double c;              // mean scattered photons before a pumping event
  double dark_fraction;  // bound on the spin-dark admixture feeding pumping
};

inline Cyclicity cyclicity_and_dark_fraction(double T_pump_ns, double T1_ns) {
  if (!(T1_ns > 0.0) || !(T_pump_ns > 0.0))
    throw std::domain_error("cyclicity_and_dark_fraction: times must be > 0");
  const double c = T_pump_ns / T1_ns;
  return {c, std::sqrt(3.0) / std::sqrt(c)};
}

struct Transition {
  double energy = 0.0;  // ueV, absolute (includes omega_center)
  StokesVector stokes;
  GroundSpin ground_spin = GroundSpin::up;
  complexd amp0;   // dipole amplitude at alpha = 0
  complexd amp90;  // at alpha = pi/2

  double rate(double alpha_pol) const {
    return std::norm(amp0 * std::cos(alpha_pol) + amp90 * std::sin(alpha_pol));
  }
};

struct TransitionSet {
  double omega_center = 0.0;  // ueV
  double omega_e = 0.0;       // electron splitting, ueV
  double omega_t = 0.0;       // trion splitting, ueV
  std::array<Transition, 4> lines;  // ascending energy: E1..E4
};

// Hole description: either a signed g-tensor or the effective in-plane
// mixing model with a set of enabled terms.
struct HoleMixModel {
  HoleMixingParameters params;
  std::vector<MixingKind> enabled = {MixingKind::non_zeeman_q};
};

using HoleModel = std::variant<GTensor, HoleMixModel>;

namespace detail {

// Trion Hamiltonian (level ladder) for a g-tensor hole. The in-plane
// quantization axis counter-rotates with phi, as dictated by the p-like
// Bloch functions; g_perp_t > 0 places the upper trion state at theta = -phi.
inline Matrix2c trion_hamiltonian(const GTensor& g, const FieldConfiguration& f) {
  const double hz = 0.5 * kMuB * g.g_z * f.bz();
  const double hp = 0.5 * kMuB * g.g_perp(f.phi) * f.B * std::sin(f.chi);
  Matrix2c h;
  const complexd off = hp * std::exp(complexd(0.0, f.phi));
  h << hz, off, std::conj(off), -hz;
  return h;
}

inline std::pair<SpinEigenpair, SpinEigenpair> trion_eigenpair(
    const HoleModel& hole, const FieldConfiguration& f) {
  if (std::holds_alternative<GTensor>(hole)) {
    const GTensor& g = std::get<GTensor>(hole);
    const double gz_term = g.g_z * std::cos(f.chi);
    const double gp_term = g.g_perp(f.phi) * std::sin(f.chi);
    const double gap = kMuB * f.B * std::hypot(gz_term, gp_term);
    // azimuth -phi: counter-rotating axis (see trion_hamiltonian)
    return canonical_doublet(gz_term, gp_term, -f.phi, gap, "trion_eigenpair");
  }
  const HoleMixModel& hm = std::get<HoleMixModel>(hole);
  const double b_perp = f.B * std::sin(f.chi);
  const Matrix2c h_trion =
      -hole_effective_hamiltonian(b_perp, f.phi, hm.params, hm.enabled);
  return inplane_doublet(h_trion, "trion_eigenpair");
}

}  // namespace detail

// Full four-line transition set: energies (ascending), Stokes vectors and
// electron ground-spin labels.
inline TransitionSet build_transition_set(const GTensor& g_e,
                                          const FieldConfiguration& field,
                                          const HoleModel& hole,
                                          double omega_center) {
  const auto e_pair = electron_eigenpair(g_e, field);
  const auto t_pair = detail::trion_eigenpair(hole, field);
  const double omega_e = e_pair.first.splitting;
  const double omega_t = t_pair.first.splitting;

  // electron spin projection along B decides the up/down label
  const double gz_term = g_e.g_z * std::cos(field.chi);
  const double gp_term = g_e.g_perp(field.phi) * std::sin(field.chi);
  const double proj_upper =
      gz_term * std::cos(field.chi) + gp_term * std::sin(field.chi);
  const GroundSpin upper_spin =
      proj_upper >= 0.0 ? GroundSpin::up : GroundSpin::down;
  const GroundSpin lower_spin =
      upper_spin == GroundSpin::up ? GroundSpin::down : GroundSpin::up;

  struct Raw {
    double energy;
    const SpinEigenpair* e;
    const SpinEigenpair* t;
    GroundSpin gs;
  };
  const std::array<Raw, 4> raw = {{
      {omega_center - 0.5 * omega_t - 0.5 * omega_e, &e_pair.first,
       &t_pair.second, upper_spin},
      {omega_center - 0.5 * omega_t + 0.5 * omega_e, &e_pair.second,
       &t_pair.second, lower_spin},
      {omega_center + 0.5 * omega_t - 0.5 * omega_e, &e_pair.first,
       &t_pair.first, upper_spin},
      {omega_center + 0.5 * omega_t + 0.5 * omega_e, &e_pair.second,
       &t_pair.first, lower_spin},
  }};
  std::array<int, 4> order = {0, 1, 2, 3};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return raw[a].energy < raw[b].energy;
  });

  TransitionSet set;
  set.omega_center = omega_center;
  set.omega_e = omega_e;
  set.omega_t = omega_t;
  for (int i = 0; i < 4; ++i) {
    const Raw& r = raw[order[i]];
    Transition tr;
    tr.energy = r.energy;
    tr.ground_spin = r.gs;
    tr.amp0 = dipole_matrix_element(*r.e, *r.t, field.phi, 0.0);
    tr.amp90 = dipole_matrix_element(*r.e, *r.t, field.phi, 0.5 * kPi);
    tr.stokes = stokes_from_amplitudes(tr.amp0, tr.amp90);
    set.lines[i] = tr;
  }
  return set;
}

struct PolMapRow {
  double phi;
  double alpha;
  int transition;  // 1..4
  double rate_norm;
};

// Polar map of normalized rates for a fixed transition set (single phi).
inline std::vector<PolMapRow> polarization_map(const TransitionSet& set,
                                               double phi,
                                               const std::vector<double>& alphas) {
  if (alphas.empty())
    throw std::domain_error("polarization_map: empty alpha grid");
  double peak = 0.0;
  for (const Transition& t : set.lines)
    for (double a : alphas) peak = std::max(peak, t.rate(a));
  std::vector<PolMapRow> rows;
  rows.reserve(alphas.size() * 4);
  for (int i = 0; i < 4; ++i)
    for (double a : alphas)
      rows.push_back({phi, a, i + 1,
                      peak > 0.0 ? set.lines[i].rate(a) / peak : 0.0});
  return rows;
}

// Map over a (phi, alpha) grid; the set is rebuilt at every phi.
inline std::vector<PolMapRow> polarization_map(
    const GTensor& g_e, double B, double chi, const HoleModel& hole,
    const std::vector<double>& phis, const std::vector<double>& alphas) {
  if (phis.empty() || alphas.empty())
    throw std::domain_error("polarization_map: empty grid");
  std::vector<PolMapRow> rows;
  rows.reserve(phis.size() * alphas.size() * 4);
  double peak = 0.0;
  std::vector<TransitionSet> sets;
  sets.reserve(phis.size());
  for (double phi : phis) {
    sets.push_back(build_transition_set(g_e, FieldConfiguration(B, chi, phi),
                                        hole, 0.0));
    for (const Transition& t : sets.back().lines)
      for (double a : alphas) peak = std::max(peak, t.rate(a));
  }
  for (size_t ip = 0; ip < phis.size(); ++ip)
    for (int i = 0; i < 4; ++i)
      for (double a : alphas)
        rows.push_back({phis[ip], a, i + 1,
                        peak > 0.0 ? sets[ip].lines[i].rate(a) / peak : 0.0});
  return rows;
}

}  // namespace qd
