#pragma once

// Bulk material parameters for the GaAs / AlAs system and their alloy
// interpolation. The single-band solver consumes E_g, VBO, m_e, the
// Luttinger parameters, E_p, Delta_SO and the bulk g; the remaining fields
// (piezoelectric, deformation, elastic constants) are stored for
// completeness only.

#include <cmath>
#include <stdexcept>

namespace qd {

struct MaterialParams {
  double a_lattice;  // Angstrom
  double E_g;        // eV
  double VBO;        // eV, valence band offset
  double E_p;        // eV
  double m_e;        // in units of m0
  double Delta_SO;   // eV
  double gamma1, gamma2, gamma3;
  double e14;                  // C/m^2
  double B114, B124, B156;     // C/m^2
  double C_k;                  // eV*Angstrom
  double a_c, a_v, b_v, d_v;   // eV, deformation potentials
  double c11, c12, c44;        // GPa
  double eps_r;
  double g;      // bulk electron g-factor
  double kappa;  // Luttinger magnetic constants
  double q;

  // heavy-hole mass along growth, simplest HH-consistent isotropic choice
  double hole_mass() const { return 1.0 / (gamma1 - 2.0 * gamma2); }
};

inline const MaterialParams& gaas() {
  static const MaterialParams m = {
      5.642, 1.519, -0.80, 28.8, 0.0665, 0.341, 6.98, 2.06, 2.93,
      -0.205, -0.99, -3.21, -1.28, -0.0034, -7.17, 1.16, -2.0, -4.8,
      1211.0, 566.0, 600.0, 12.4, -0.44, 1.28, 0.04};
  return m;
}

inline const MaterialParams& alas() {
  static const MaterialParams m = {
      5.652, 3.099, -1.32, 21.1, 0.15, 0.28, 3.76, 0.82, 1.42,
      -0.055, -1.61, -2.59, -1.32, 0.002, -5.64, 2.47, -2.3, -3.4,
      1250.0, 534.0, 542.0, 10.06, 1.52, 0.12, 0.04};
  return m;
}

// E_g bowing for Al_x Ga_{1-x} As (all other parameters interpolate linearly)
inline double eg_bowing(double x) { return -0.13 + 1.31 * x; }

inline MaterialParams material_interp(double x) {
  if (!(x >= 0.0 && x <= 1.0))
    throw std::domain_error("material_interp: Al fraction must be in [0, 1]");
  const MaterialParams& g0 = gaas();
  const MaterialParams& a1 = alas();
  auto lin = [x](double g, double a) { return (1.0 - x) * g + x * a; };
  MaterialParams m{};
  m.a_lattice = lin(g0.a_lattice, a1.a_lattice);
  m.E_g = lin(g0.E_g, a1.E_g) - x * (1.0 - x) * eg_bowing(x);
  m.VBO = lin(g0.VBO, a1.VBO);
  m.E_p = lin(g0.E_p, a1.E_p);
  m.m_e = lin(g0.m_e, a1.m_e);
  m.Delta_SO = lin(g0.Delta_SO, a1.Delta_SO);
  m.gamma1 = lin(g0.gamma1, a1.gamma1);
  m.gamma2 = lin(g0.gamma2, a1.gamma2);
  m.gamma3 = lin(g0.gamma3, a1.gamma3);
  m.e14 = lin(g0.e14, a1.e14);
  m.B114 = lin(g0.B114, a1.B114);
  m.B124 = lin(g0.B124, a1.B124);
  m.B156 = lin(g0.B156, a1.B156);
  m.C_k = lin(g0.C_k, a1.C_k);
  m.a_c = lin(g0.a_c, a1.a_c);
  m.a_v = lin(g0.a_v, a1.a_v);
  m.b_v = lin(g0.b_v, a1.b_v);
  m.d_v = lin(g0.d_v, a1.d_v);
  m.c11 = lin(g0.c11, a1.c11);
  m.c12 = lin(g0.c12, a1.c12);
  m.c44 = lin(g0.c44, a1.c44);
  m.eps_r = lin(g0.eps_r, a1.eps_r);
  m.g = lin(g0.g, a1.g);
  m.kappa = lin(g0.kappa, a1.kappa);
  m.q = lin(g0.q, a1.q);
  return m;
}

}  // namespace qd
