#pragma once

// Spectrum analysis: shared-width double-Gaussian line fitting, g-factor
// extraction from the four line centers, area-based rectilinear Stokes
// estimates, fine-structure cosine fits, and a synthetic gate-voltage /
// frequency resonance-fluorescence map.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qd/constants.hpp"
#include "qd/errors.hpp"
#include "qd/optics.hpp"

namespace qd {

struct Spectrum {
  std::vector<double> energy;  // ueV, strictly increasing
  std::vector<double> counts;

  void validate() const {
    if (energy.size() != counts.size() || energy.size() < 4)
      throw std::domain_error("Spectrum: grids must match and hold >= 4 samples");
    for (size_t i = 1; i < energy.size(); ++i)
      if (!(energy[i] > energy[i - 1]))
        throw std::domain_error("Spectrum: energy grid must increase strictly");
    for (double c : counts)
      if (!(c >= 0.0) || !std::isfinite(c))
        throw std::domain_error("Spectrum: counts must be finite and >= 0");
  }
};

// header `energy_eV,counts` or `energy_ueV,counts`; canonicalizes to ueV
inline Spectrum load_spectrum_csv(std::istream& is) {
  std::string line;
  do {
    if (!std::getline(is, line)) throw std::runtime_error("spectrum: empty file");
  } while (!line.empty() && line[0] == '#');
  double scale = 0.0;
  if (line.rfind("energy_eV,", 0) == 0) scale = 1e6;
  else if (line.rfind("energy_ueV,", 0) == 0) scale = 1.0;
  else throw std::runtime_error("spectrum: header must declare energy_eV or energy_ueV");
  Spectrum s;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    double e, c;
    if (std::sscanf(line.c_str(), "%lf,%lf", &e, &c) != 2)
      throw std::runtime_error("spectrum: bad row: " + line);
    s.energy.push_back(e * scale);
    s.counts.push_back(c);
  }
  s.validate();
  return s;
}

struct DoubleGaussianFit {
  double c1 = 0.0, c2 = 0.0;      // centers, ueV, c1 <= c2
  double sigma = 0.0;             // shared width, ueV
  double amp1 = 0.0, amp2 = 0.0;  // amplitudes in the order of c1, c2
  double unc_c1 = 0.0, unc_c2 = 0.0, unc_sigma = 0.0;
  double residual_rms = 0.0;
  int iterations = 0;
};

// Shared-sigma double-Gaussian least squares (Levenberg-Marquardt with an
// analytic Jacobian, deterministic initialization from the given centers).
inline DoubleGaussianFit fit_double_gaussian(const Spectrum& s, double init_c1,
                                             double init_c2,
                                             double init_sigma = 0.0) {
  s.validate();
  const double lo = s.energy.front(), hi = s.energy.back();
  if (init_c1 < lo || init_c1 > hi || init_c2 < lo || init_c2 > hi)
    throw std::domain_error("fit_double_gaussian: initial centers outside the grid");
  const size_t n = s.energy.size();

  auto nearest_counts = [&](double c) {
    const auto it = std::lower_bound(s.energy.begin(), s.energy.end(), c);
    const size_t i = std::min<size_t>(it - s.energy.begin(), n - 1);
    return std::max(s.counts[i], 1e-12);
  };

  Eigen::VectorXd p(5);
  p << std::min(init_c1, init_c2), std::max(init_c1, init_c2),
      init_sigma > 0.0 ? init_sigma
                       : std::max(std::abs(init_c2 - init_c1) / 4.0,
                                  2.0 * (hi - lo) / n),
      nearest_counts(init_c1), nearest_counts(init_c2);

  auto residual = [&](const Eigen::VectorXd& q, Eigen::VectorXd& r,
                      Eigen::MatrixXd* jac) {
    const double c1 = q(0), c2 = q(1), sg = q(2), a1 = q(3), a2 = q(4);
    for (size_t i = 0; i < n; ++i) {
      const double u1 = (s.energy[i] - c1) / sg;
      const double u2 = (s.energy[i] - c2) / sg;
      const double g1 = std::exp(-0.5 * u1 * u1);
      const double g2 = std::exp(-0.5 * u2 * u2);
      r(i) = a1 * g1 + a2 * g2 - s.counts[i];
      if (jac) {
        (*jac)(i, 0) = a1 * g1 * u1 / sg;
        (*jac)(i, 1) = a2 * g2 * u2 / sg;
        (*jac)(i, 2) = (a1 * g1 * u1 * u1 + a2 * g2 * u2 * u2) / sg;
        (*jac)(i, 3) = g1;
        (*jac)(i, 4) = g2;
      }
    }
  };

  Eigen::VectorXd r(n), rt(n);
  Eigen::MatrixXd jac(n, 5);
  residual(p, r, &jac);
  double chi2 = r.squaredNorm();
  double lm = 1e-3;
  int it = 0;
  const int max_it = 400;
  for (; it < max_it; ++it) {
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * r;
    Eigen::MatrixXd lhs = jtj;
    lhs.diagonal() += lm * jtj.diagonal().cwiseMax(1e-30);
    const Eigen::VectorXd step = lhs.ldlt().solve(-jtr);
    Eigen::VectorXd pt = p + step;
    pt(2) = std::abs(pt(2));
    if (pt(2) < 1e-12) pt(2) = 1e-12;
    residual(pt, rt, nullptr);
    const double chi2_t = rt.squaredNorm();
    if (chi2_t < chi2) {
      const double rel = (chi2 - chi2_t) / std::max(chi2, 1e-300);
      p = pt;
      residual(p, r, &jac);
      chi2 = chi2_t;
      lm = std::max(lm * 0.3, 1e-12);
      if (rel < 1e-14) break;
    } else {
      lm *= 8.0;
      if (lm > 1e12) break;
    }
  }
  if (it >= max_it)
    throw unresolved_doublet_error("fit_double_gaussian: no convergence");

  DoubleGaussianFit out;
  const bool swap = p(0) > p(1);
  out.c1 = swap ? p(1) : p(0);
  out.c2 = swap ? p(0) : p(1);
  out.amp1 = swap ? p(4) : p(3);
  out.amp2 = swap ? p(3) : p(4);
  out.sigma = std::abs(p(2));
  out.residual_rms = std::sqrt(chi2 / n);
  out.iterations = it + 1;
  if (std::abs(out.c2 - out.c1) < out.sigma / 4.0)
    throw unresolved_doublet_error(
        "fit_double_gaussian: centers merged below sigma/4; doublet unresolved");

  // parameter uncertainties from the local quadratic model
  if (n > 5) {
    residual(p, r, &jac);
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::MatrixXd cov =
        jtj.ldlt().solve(Eigen::MatrixXd::Identity(5, 5)) * (chi2 / (n - 5));
    out.unc_c1 = std::sqrt(std::max(0.0, cov(swap ? 1 : 0, swap ? 1 : 0)));
    out.unc_c2 = std::sqrt(std::max(0.0, cov(swap ? 0 : 1, swap ? 0 : 1)));
    out.unc_sigma = std::sqrt(std::max(0.0, cov(2, 2)));
  }
  return out;
}

struct GFactorEstimate {
  double g_e_abs;       // magnitudes only; signs are not observable here
  double g_t_abs;
  double omega_e_ueV;   // signed combinations of the centers
  double omega_t_ueV;
};

// Electron/trion splittings from the four line centers (eV, ascending
// labels) and the g magnitudes at field B. On ascending centers the two
// combinations recover min and max of the splittings; the electron/trion
// assignment below assumes |omega_e| < |omega_t|, and the opposite ordering
// swaps the estimates (resolved experimentally by the dragging protocol).
inline GFactorEstimate g_from_centers(double w1_eV, double w2_eV, double w3_eV,
                                      double w4_eV, double B_tesla) {
  if (!(B_tesla > 0.0))
    throw std::domain_error("g_from_centers: B must be positive");
  const double s = 1e6;  // eV -> ueV
  const double we = 0.5 * (w2_eV - w1_eV) * s + 0.5 * (w4_eV - w3_eV) * s;
  const double wt = 0.5 * (w1_eV + w2_eV) * s - 0.5 * (w3_eV + w4_eV) * s;
  return {std::abs(we) / (kMuB * B_tesla), std::abs(wt) / (kMuB * B_tesla), we, wt};
}

// The literal area-ratio estimate s1 = A1/(A1+A2); the orthogonal line set
// is assigned the opposite sign. Note this is a lower bound, not the
// conventional contrast (A1-A2)/(A1+A2), which is exposed separately.
inline double rectilinear_stokes_from_areas(double a1, double a2) {
  if (a1 < 0.0 || a2 < 0.0 || a1 + a2 <= 0.0)
    throw std::domain_error("rectilinear_stokes_from_areas: need non-negative areas with a positive sum");
  return a1 / (a1 + a2);
}

inline double linear_polarization_contrast(double a1, double a2) {
  if (a1 < 0.0 || a2 < 0.0 || a1 + a2 <= 0.0)
    throw std::domain_error("linear_polarization_contrast: need non-negative areas with a positive sum");
  return (a1 - a2) / (a1 + a2);
}

struct PolarizationSeries {
  std::vector<double> angle;  // radians
  std::vector<double> value;  // peak position (ueV) or intensity

  void validate() const {
    if (angle.size() != value.size())
      throw std::domain_error("PolarizationSeries: grids must match");
    if (angle.size() < 8)
      throw std::domain_error("PolarizationSeries: need at least 8 samples");
    const auto [mn, mx] = std::minmax_element(angle.begin(), angle.end());
    if (*mx - *mn < kPi - 1e-9)
      throw std::domain_error("PolarizationSeries: angles must span at least pi");
  }
};

struct FssFit {
  double fss = 0.0;     // peak-to-peak amplitude, ueV
  double eta = 0.0;     // asymmetry axis, [0, pi)
  double offset = 0.0;
  double residual_rms = 0.0;
  bool zero_fss = false;  // amplitude below the noise floor; eta undefined
};

// value(beta) = offset + (fss/2) cos(2(beta - eta)), solved as a linear
// least-squares problem in (offset, a, b) with a cos + b sin.
inline FssFit fss_fit(const PolarizationSeries& series, double noise_floor = 1e-6) {
  series.validate();
  const size_t n = series.angle.size();
  Eigen::MatrixXd m(n, 3);
  Eigen::VectorXd y(n);
  for (size_t i = 0; i < n; ++i) {
    m(i, 0) = 1.0;
    m(i, 1) = std::cos(2.0 * series.angle[i]);
    m(i, 2) = std::sin(2.0 * series.angle[i]);
    y(i) = series.value[i];
  }
  const Eigen::VectorXd sol = (m.transpose() * m).ldlt().solve(m.transpose() * y);
  FssFit out;
  out.offset = sol(0);
  out.fss = 2.0 * std::hypot(sol(1), sol(2));
  out.eta = wrap_axis(0.5 * std::atan2(sol(2), sol(1)));
  out.residual_rms = std::sqrt((m * sol - y).squaredNorm() / n);
  const double floor =
      std::max(noise_floor, 4.0 * out.residual_rms * std::sqrt(2.0 / n));
  if (out.fss < floor) {
    out.zero_fss = true;
    out.eta = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

struct RfMap {
  std::vector<double> v_gate;     // V
  std::vector<double> omega_ueV;  // detuning axis
  Eigen::MatrixXd intensity;      // (v_gate, omega)
};

// Four Lorentzian ridges shifted linearly in gate voltage, emitted only
// inside the bright voltage windows.
inline RfMap synth_rf_map(const TransitionSet& set, double stark_slope_GHz_per_V,
                          const std::vector<std::pair<double, double>>& windows,
                          double linewidth_ueV, const std::vector<double>& v_grid,
                          const std::vector<double>& omega_grid,
                          double v_ref = 0.0) {
  if (windows.empty())
    throw std::domain_error("synth_rf_map: need at least one bright window");
  if (v_grid.empty() || omega_grid.empty())
    throw std::domain_error("synth_rf_map: empty grids");
  if (!(linewidth_ueV > 0.0))
    throw std::domain_error("synth_rf_map: linewidth must be > 0");
  const double slope_ueV = stark_slope_GHz_per_V * kPlanckH;
  RfMap map;
  map.v_gate = v_grid;
  map.omega_ueV = omega_grid;
  map.intensity = Eigen::MatrixXd::Zero(v_grid.size(), omega_grid.size());
  for (size_t iv = 0; iv < v_grid.size(); ++iv) {
    const double v = v_grid[iv];
    bool bright = false;
    for (const auto& w : windows)
      if (v >= w.first && v <= w.second) bright = true;
    if (!bright) continue;
    const double shift = slope_ueV * (v - v_ref);
    for (size_t iw = 0; iw < omega_grid.size(); ++iw) {
      double acc = 0.0;
      for (const Transition& t : set.lines) {
        const double d = 2.0 * (omega_grid[iw] - (t.energy + shift)) / linewidth_ueV;
        acc += t.stokes.s0 * (1.0 / (1.0 + d * d));
      }
      map.intensity(iv, iw) = acc;
    }
  }
  return map;
}

}  // namespace qd
