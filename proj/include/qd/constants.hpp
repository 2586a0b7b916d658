#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>

namespace qd {

inline constexpr double kPi = 3.14159265358979323846;

// Internal energy unit is ueV throughout the spin/optics layers.
// Frequencies quoted as f = omega/2pi convert through h, not hbar.
struct PhysicalConstants {
  double mu_B = 57.88381806;      // ueV / T
  double planck_h = 4.135667696;  // ueV / GHz
  double hc = 1239.84198;         // eV * nm
};

inline constexpr double kMuB = 57.88381806;      // ueV / T
inline constexpr double kPlanckH = 4.135667696;  // ueV / GHz
inline constexpr double kHc = 1239.84198;        // eV * nm

// hbar^2 / (2 m0), for effective-mass kinetic terms (meV * nm^2)
inline constexpr double kHbar2Over2m0 = 38.0998212;

using Matrix2c = Eigen::Matrix2cd;
using complexd = std::complex<double>;

inline Matrix2c pauli_x() {
  Matrix2c m;
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

inline Matrix2c pauli_y() {
  Matrix2c m;
  m << complexd(0, 0), complexd(0, -1), complexd(0, 1), complexd(0, 0);
  return m;
}

inline Matrix2c pauli_z() {
  Matrix2c m;
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

// wrap into [0, 2pi)
inline double wrap_two_pi(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a;
}

// wrap into (-pi, pi]
inline double wrap_pi(double a) {
  a = wrap_two_pi(a);
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

// wrap into [0, pi) -- e.g. for linear-polarization axes
inline double wrap_axis(double a) {
  a = std::fmod(a, kPi);
  if (a < 0.0) a += kPi;
  if (a >= kPi) a -= kPi;  // guards fmod edge at pi
  return a;
}

// minimal circular distance mod 2pi
inline double angle_distance(double a, double b) {
  return std::abs(wrap_pi(a - b));
}

// minimal distance between undirected axes (mod pi)
inline double axis_distance(double a, double b) {
  double d = std::fmod(std::abs(a - b), kPi);
  return std::min(d, kPi - d);
}

}  // namespace qd
