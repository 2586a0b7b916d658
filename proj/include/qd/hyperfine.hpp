#pragma once

// Fermi-contact hyperfine energetics and a mean-field laser-sweep simulator
// for nuclear-polarization dragging. The polarization I_x is a scalar net
// flip count; one flip shifts the optical resonance by -a S_x. Side-band
// pumping is modeled by two Lorentzians of the optical linewidth centered at
// the single-flip detunings, which makes the S_x = +1/2 manifold with a > 0
// self-stabilize and the S_x = -1/2 manifold avoid resonance.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "qd/constants.hpp"
#include "qd/errors.hpp"
#include "qd/optics.hpp"

namespace qd {

struct NuclearBathParameters {
  double a = 0.8;             // ueV per nuclear flip (> 0 in Ga and As)
  double gamma_n_B = 1.6;     // ueV nuclear Zeeman at the working field
  double relax_rate = 5.0;    // 1/s, nuclear relaxation
  double sideband_rate = 400.0;  // 1/s, peak side-band pumping
  double optical_linewidth = 0.7 * kPlanckH;  // ueV FWHM (Fourier-limited)

  NuclearBathParameters() = default;
  NuclearBathParameters(double a_, double gnB, double relax, double sideband,
                        double linewidth)
      : a(a_), gamma_n_B(gnB), relax_rate(relax), sideband_rate(sideband),
        optical_linewidth(linewidth) {
    if (!std::isfinite(a) || a == 0.0)
      throw std::domain_error("NuclearBathParameters: a must be nonzero");
    if (!std::isfinite(gamma_n_B))
      throw std::domain_error("NuclearBathParameters: gamma_n_B must be finite");
    if (relax_rate < 0.0 || sideband_rate < 0.0)
      throw std::domain_error("NuclearBathParameters: rates must be >= 0");
    if (!(optical_linewidth > 0.0))
      throw std::domain_error("NuclearBathParameters: linewidth must be > 0");
  }
};

enum class SweepDirection { up, down };

struct SweepSpec {
  double omega0 = 0.0;      // unshifted resonance, ueV
  double half_range = 20.0; // sweep covers omega0 +/- half_range
  int n_points = 801;
  double rate = 8.0;        // ueV / s, > 0
  SweepDirection direction = SweepDirection::up;
};

struct DragScan {
  SweepDirection direction = SweepDirection::up;
  std::vector<double> omega_L;    // ueV, in sweep order
  std::vector<double> intensity;  // normalized to [0, 1]
  std::vector<double> I_x_trace;  // nuclear polarization history
  double linewidth = 0.0;         // ueV FWHM used for the optical line
  double omega0 = 0.0;            // unshifted resonance
};

// peak-normalized Lorentzian with FWHM gamma
inline double lorentzian(double x, double gamma) {
  const double r = 2.0 * x / gamma;
  return 1.0 / (1.0 + r * r);
}

// |spacing| between adjacent nuclear manifold states for electron spin S_x
inline double manifold_spacing(double S_x, double gamma_n_B, double a) {
  return std::abs(-gamma_n_B + a * S_x);
}

// Optical shift of a transition from net nuclear polarization; the trion is
// unaffected, so the shift carries the electron ground-spin sign.
inline double overhauser_shift(double I_x, double a, GroundSpin ground_spin) {
  const double S_x = ground_spin == GroundSpin::up ? 0.5 : -0.5;
  return -a * S_x * I_x;
}

inline DragScan drag_sweep(const NuclearBathParameters& bath,
                           GroundSpin ground_spin, const SweepSpec& sweep) {
  if (!(sweep.rate > 0.0)) throw std::domain_error("drag_sweep: rate must be > 0");
  if (sweep.n_points < 2 || !(sweep.half_range > 0.0))
    throw std::domain_error("drag_sweep: invalid sweep grid");

  const double S_x = ground_spin == GroundSpin::up ? 0.5 : -0.5;
  const double d_center = bath.gamma_n_B - bath.a * S_x;  // signed flip cost
  const double gamma = bath.optical_linewidth;
  const double w0 = bath.sideband_rate;
  const double gd = bath.relax_rate;

  DragScan scan;
  scan.direction = sweep.direction;
  scan.linewidth = gamma;
  scan.omega0 = sweep.omega0;
  scan.omega_L.resize(sweep.n_points);
  scan.intensity.resize(sweep.n_points);
  scan.I_x_trace.resize(sweep.n_points);

  const double span = 2.0 * sweep.half_range;
  const double dgrid = span / (sweep.n_points - 1);
  for (int i = 0; i < sweep.n_points; ++i) {
    const double x = -sweep.half_range + i * dgrid;
    scan.omega_L[i] =
        sweep.omega0 + (sweep.direction == SweepDirection::up ? x : -x);
  }

  const double grid_dt = dgrid / sweep.rate;
  const double max_rate = std::max({w0, gd, 1e-9});
  const int substeps =
      std::max(1, static_cast<int>(std::ceil(grid_dt * max_rate * 10.0)));
  const double dt = grid_dt / substeps;

  double I = 0.0;
  double omega_l = scan.omega_L[0];
  const double domega =
      (sweep.direction == SweepDirection::up ? dgrid : -dgrid) / substeps;

  auto detuning = [&](double wl, double ix) {
    return wl - (sweep.omega0 - bath.a * S_x * ix);
  };

  scan.intensity[0] = lorentzian(detuning(omega_l, I), gamma);
  scan.I_x_trace[0] = I;
  for (int i = 1; i < sweep.n_points; ++i) {
    for (int s = 0; s < substeps; ++s) {
      const double delta = detuning(omega_l, I);
      const double pump = w0 * (lorentzian(delta + d_center, gamma) -
                                lorentzian(delta - d_center, gamma));
      I += dt * (pump - gd * I);
      omega_l += domega;
    }
    if (!std::isfinite(I))
      throw convergence_error("drag_sweep: polarization diverged at omega_L=" +
                                  std::to_string(omega_l),
                              I);
    omega_l = scan.omega_L[i];  // resync, kills accumulated rounding drift
    scan.intensity[i] = lorentzian(detuning(omega_l, I), gamma);
    scan.I_x_trace[i] = I;
  }
  return scan;
}

enum class LineshapeClass { dragging, antidragging, neutral };

inline char lineshape_char(LineshapeClass c) {
  switch (c) {
    case LineshapeClass::dragging: return 'D';
    case LineshapeClass::antidragging: return 'A';
    default: return 'N';
  }
}

namespace detail {

inline double plateau_width(const std::vector<double>& omega,
                            const std::vector<double>& intensity,
                            double level_fraction) {
  const double peak = *std::max_element(intensity.begin(), intensity.end());
  if (peak <= 0.0) return 0.0;
  const double level = level_fraction * peak;
  double best = 0.0;
  size_t run_start = 0;
  bool in_run = false;
  for (size_t i = 0; i <= intensity.size(); ++i) {
    const bool above = i < intensity.size() && intensity[i] >= level;
    if (above && !in_run) {
      in_run = true;
      run_start = i;
    } else if (!above && in_run) {
      in_run = false;
      best = std::max(best, std::abs(omega[i - 1] - omega[run_start]));
    }
  }
  return best;
}

inline double trace_area(const std::vector<double>& omega,
                         const std::vector<double>& intensity) {
  double area = 0.0;
  for (size_t i = 1; i < omega.size(); ++i)
    area += 0.5 * (intensity[i] + intensity[i - 1]) *
            std::abs(omega[i] - omega[i - 1]);
  return area;
}

}  // namespace detail

// classification thresholds
inline constexpr double kPlateauLevel = 0.8;        // of peak
inline constexpr double kPlateauMinLinewidths = 3.0;
inline constexpr double kAreaSuppression = 0.95;    // of the feedback-free area
inline constexpr double kHysteresisMin = 0.02;      // normalized intensity

inline LineshapeClass classify_lineshape(const DragScan& up, const DragScan& down) {
  if (up.omega_L.size() != down.omega_L.size())
    throw std::invalid_argument("classify_lineshape: grids must match");
  const size_t n = up.omega_L.size();
  for (size_t i = 0; i < n; ++i) {
    if (std::abs(up.omega_L[i] - down.omega_L[n - 1 - i]) >
        1e-9 * (1.0 + std::abs(up.omega_L[i])))
      throw std::invalid_argument("classify_lineshape: grids must match");
  }

  const double w_up = detail::plateau_width(up.omega_L, up.intensity, kPlateauLevel);
  const double w_dn = detail::plateau_width(down.omega_L, down.intensity, kPlateauLevel);
  const double min_plateau = kPlateauMinLinewidths * up.linewidth;
  if (w_up >= min_plateau && w_dn >= min_plateau)
    return LineshapeClass::dragging;

  // feedback-free reference on the same grid
  std::vector<double> ref(n);
  for (size_t i = 0; i < n; ++i)
    ref[i] = lorentzian(up.omega_L[i] - up.omega0, up.linewidth);
  const double ref_area = detail::trace_area(up.omega_L, ref);
  const double area =
      0.5 * (detail::trace_area(up.omega_L, up.intensity) +
             detail::trace_area(down.omega_L, down.intensity));
  double hyst = 0.0;
  for (size_t i = 0; i < n; ++i)
    hyst = std::max(hyst, std::abs(up.intensity[i] - down.intensity[n - 1 - i]));

  if (area < kAreaSuppression * ref_area && hyst > kHysteresisMin)
    return LineshapeClass::antidragging;
  return LineshapeClass::neutral;
}

// FWHM of the dominant line by linear interpolation of the half-max crossings
inline double fitted_fwhm(const DragScan& scan) {
  const auto& y = scan.intensity;
  const auto& x = scan.omega_L;
  const size_t ipk =
      std::max_element(y.begin(), y.end()) - y.begin();
  const double half = 0.5 * y[ipk];
  double left = x.front(), right = x.back();
  for (size_t i = ipk; i > 0; --i) {
    if (y[i - 1] < half) {
      const double f = (half - y[i - 1]) / (y[i] - y[i - 1]);
      left = x[i - 1] + f * (x[i] - x[i - 1]);
      break;
    }
  }
  for (size_t i = ipk; i + 1 < y.size(); ++i) {
    if (y[i + 1] < half) {
      const double f = (y[i] - half) / (y[i] - y[i + 1]);
      right = x[i] + f * (x[i + 1] - x[i]);
      break;
    }
  }
  return std::abs(right - left);
}

enum class MagnitudeOrder { electron_smaller, electron_larger };

struct SignPair {
  int sign_e;
  int sign_t;
};

// Sign inference from the measured TDM orientation and the D/A pattern of
// the four transitions in ascending energy order. The TDM orientation fixes
// whether the in-plane g signs are equal; the D/A label of E1 fixes the
// electron sign (E1 always involves the upper electron level, and with
// a > 0 the spin-up manifold drags).
inline SignPair infer_signs(bool tdm_14_parallel_B,
                            const std::array<LineshapeClass, 4>& labels,
                            MagnitudeOrder magnitude_order) {
  int n_drag = 0;
  for (LineshapeClass c : labels) {
    if (c == LineshapeClass::neutral)
      throw inconsistency_error("infer_signs: neutral label carries no spin information");
    if (c == LineshapeClass::dragging) ++n_drag;
  }
  if (n_drag != 2)
    throw inconsistency_error("infer_signs: labels must contain exactly two D and two A");

  const bool alternating = labels[0] != labels[1] && labels[1] != labels[2] &&
                           labels[2] != labels[3];
  const bool paired = labels[0] == labels[1] && labels[2] == labels[3];
  if (!alternating && !paired)
    throw inconsistency_error(
        "infer_signs: pattern violates the two-manifold level structure "
        "(expected alternating or half-half D/A)");
  if (alternating && magnitude_order != MagnitudeOrder::electron_smaller)
    throw inconsistency_error(
        "infer_signs: alternating D/A pattern requires |g_e| < |g_t|");
  if (paired && magnitude_order != MagnitudeOrder::electron_larger)
    throw inconsistency_error(
        "infer_signs: half-half D/A pattern requires |g_e| > |g_t|");

  const int sign_e = labels[0] == LineshapeClass::dragging ? +1 : -1;
  const int sign_t = tdm_14_parallel_B ? sign_e : -sign_e;
  return {sign_e, sign_t};
}

}  // namespace qd
