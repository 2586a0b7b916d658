#pragma once

// Reduced effective-mass design solver: nanohole geometry -> single-band
// ground states -> emission wavelength -> electron-g estimate. This is a
// deliberately simple surrogate for a multiband treatment; it targets trends
// and the location of the g zero-crossing, not quantitative g maps.

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qd/constants.hpp"
#include "qd/errors.hpp"
#include "qd/material.hpp"
#include "qd/spin.hpp"

namespace qd {

using ArrayXd = Eigen::ArrayXd;

struct Grid3 {
  int nx = 0, ny = 0, nz = 0;
  double x0 = 0.0, y0 = 0.0, z0 = 0.0;  // nm, first grid point
  double dx = 1.0, dy = 1.0, dz = 1.0;  // nm

  Eigen::Index size() const {
    return static_cast<Eigen::Index>(nx) * ny * nz;
  }
  Eigen::Index index(int i, int j, int k) const {
    return (static_cast<Eigen::Index>(i) * ny + j) * nz + k;
  }
  double x(int i) const { return x0 + i * dx; }
  double y(int j) const { return y0 + j * dy; }
  double z(int k) const { return z0 + k * dz; }
  double cell_volume() const { return dx * dy * dz; }
};

// Effective-mass Hamiltonian on a grid: position-dependent inverse mass with
// midpoint averaging, hard-wall boundaries, energies in meV.
struct HamiltonianGrid {
  Grid3 grid;
  ArrayXd potential;  // meV
  ArrayXd inv_mass;   // 1 / (m*/m0)

  void apply(const ArrayXd& psi, ArrayXd& out) const {
    const int nx = grid.nx, ny = grid.ny, nz = grid.nz;
    const double cx = kHbar2Over2m0 / (grid.dx * grid.dx);
    const double cy = kHbar2Over2m0 / (grid.dy * grid.dy);
    const double cz = kHbar2Over2m0 / (grid.dz * grid.dz);
    const Eigen::Index sx = static_cast<Eigen::Index>(ny) * nz;
    const Eigen::Index sy = nz;
    const double* p = psi.data();
    const double* im = inv_mass.data();
    const double* v = potential.data();
    double* o = out.data();
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < ny; ++j) {
        const Eigen::Index base = (static_cast<Eigen::Index>(i) * ny + j) * nz;
        for (int k = 0; k < nz; ++k) {
          const Eigen::Index idx = base + k;
          const double imc = im[idx];
          double acc = 0.0;
          double diag = 0.0;
          auto link = [&](Eigen::Index nb, bool in, double c) {
            const double w = in ? 0.5 * (imc + im[nb]) : imc;
            diag += c * w;
            if (in) acc -= c * w * p[nb];
          };
          link(idx - sx, i > 0, cx);
          link(idx + sx, i < nx - 1, cx);
          link(idx - sy, j > 0, cy);
          link(idx + sy, j < ny - 1, cy);
          link(idx - 1, k > 0, cz);
          link(idx + 1, k < nz - 1, cz);
          o[idx] = (diag + v[idx]) * p[idx] + acc;
        }
      }
    }
  }

  ArrayXd diagonal() const {
    ArrayXd d(grid.size());
    const int nx = grid.nx, ny = grid.ny, nz = grid.nz;
    const double cx = kHbar2Over2m0 / (grid.dx * grid.dx);
    const double cy = kHbar2Over2m0 / (grid.dy * grid.dy);
    const double cz = kHbar2Over2m0 / (grid.dz * grid.dz);
    const double* im = inv_mass.data();
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < ny; ++j) {
        const Eigen::Index base = (static_cast<Eigen::Index>(i) * ny + j) * nz;
        for (int k = 0; k < nz; ++k) {
          const Eigen::Index idx = base + k;
          const double imc = im[idx];
          auto w = [&](Eigen::Index nb, bool in) {
            return in ? 0.5 * (imc + im[nb]) : imc;
          };
          d[idx] = potential[idx] +
                   cx * (w(idx - static_cast<Eigen::Index>(ny) * nz, i > 0) +
                         w(idx + static_cast<Eigen::Index>(ny) * nz, i < nx - 1)) +
                   cy * (w(idx - nz, j > 0) + w(idx + nz, j < ny - 1)) +
                   cz * (w(idx - 1, k > 0) + w(idx + 1, k < nz - 1));
        }
      }
    return d;
  }
};

struct EnvelopeSolution {
  double energy = 0.0;  // meV above the reference band edge
  ArrayXd wavefunction;  // normalized: sum psi^2 dV = 1
  double barrier_occupancy = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

namespace detail {

// Locally optimal preconditioned CG for the lowest eigenpair.
inline EnvelopeSolution lobpcg_ground_state(const HamiltonianGrid& h,
                                            const ArrayXd& guess, double tol,
                                            int max_iterations) {
  const Eigen::Index n = h.grid.size();
  const ArrayXd diag = h.diagonal();
  const double diag_span = diag.maxCoeff() - diag.minCoeff();
  const double floor = std::max(1e-6 * diag_span, 1e-12);

  ArrayXd x = guess;
  x /= std::sqrt(x.matrix().squaredNorm());
  ArrayXd hx(n), hw(n), hp(n), w(n), r(n);
  ArrayXd p = ArrayXd::Zero(n);
  bool have_p = false;
  h.apply(x, hx);
  double lambda = x.matrix().dot(hx.matrix());

  auto dot = [](const ArrayXd& a, const ArrayXd& b) {
    return a.matrix().dot(b.matrix());
  };

  for (int it = 1; it <= max_iterations; ++it) {
    r = hx - lambda * x;
    const double rnorm = std::sqrt(dot(r, r));
    if (rnorm <= tol * (std::abs(lambda) + 1.0)) {
      EnvelopeSolution sol;
      sol.energy = lambda;
      sol.wavefunction = x;
      sol.iterations = it;
      sol.residual = rnorm;
      return sol;
    }
    w = r / (diag - lambda).cwiseMax(floor);

    // orthonormalize {x, w, p}
    w -= dot(x, w) * x;
    double wn = std::sqrt(dot(w, w));
    if (wn < 1e-14) w = r;  // fall back to the raw residual direction
    w /= std::sqrt(dot(w, w));
    w -= dot(x, w) * x;
    w /= std::sqrt(dot(w, w));
    h.apply(w, hw);

    int m = 2;
    ArrayXd pn(n);
    if (have_p) {
      pn = p - dot(x, p) * x;
      pn -= dot(w, pn) * w;
      const double nrm = std::sqrt(dot(pn, pn));
      if (nrm > 1e-10) {
        pn /= nrm;
        m = 3;
      }
    }
    if (m == 3) h.apply(pn, hp);

    Eigen::MatrixXd a(m, m);
    const ArrayXd* basis[3] = {&x, &w, &pn};
    const ArrayXd* hbasis[3] = {&hx, &hw, &hp};
    for (int ib = 0; ib < m; ++ib)
      for (int jb = ib; jb < m; ++jb) {
        a(ib, jb) = dot(*basis[ib], *hbasis[jb]);
        a(jb, ib) = a(ib, jb);
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    const Eigen::VectorXd y = es.eigenvectors().col(0);

    ArrayXd xn = y(0) * x + y(1) * w;
    ArrayXd hxn = y(0) * hx + y(1) * hw;
    ArrayXd pdir = y(1) * w;
    ArrayXd hpdir = y(1) * hw;
    if (m == 3) {
      xn += y(2) * pn;
      hxn += y(2) * hp;
      pdir += y(2) * pn;
      hpdir += y(2) * hp;
    }
    const double xnorm = std::sqrt(dot(xn, xn));
    x = xn / xnorm;
    hx = hxn / xnorm;
    const double pnorm = std::sqrt(dot(pdir, pdir));
    if (pnorm > 1e-12) {
      p = pdir / pnorm;
      have_p = true;
    } else {
      have_p = false;
    }
    lambda = es.eigenvalues()(0);
  }
  r = hx - lambda * x;
  throw convergence_error("lobpcg_ground_state: no convergence",
                          std::sqrt(dot(r, r)));
}

}  // namespace detail

// Ground state of the discrete Hamiltonian. The wavefunction is normalized
// with the cell volume so that sum(psi^2) dV = 1.
inline EnvelopeSolution solve_ground_state(const HamiltonianGrid& h, double tol,
                                           int max_iterations = 1200,
                                           const ArrayXd* initial = nullptr) {
  if (!(tol > 0.0)) throw std::domain_error("solve_ground_state: tol must be > 0");
  ArrayXd guess;
  if (initial) {
    guess = *initial;
  } else {
    // deterministic start: positive sine envelope over the whole box (exact
    // for a flat potential) plus a blob at the potential minimum
    Eigen::Index imin = 0;
    h.potential.minCoeff(&imin);
    const int nz = h.grid.nz, ny = h.grid.ny;
    const int k0 = static_cast<int>(imin % nz);
    const int j0 = static_cast<int>((imin / nz) % ny);
    const int i0 = static_cast<int>(imin / (static_cast<Eigen::Index>(ny) * nz));
    guess.resize(h.grid.size());
    const double wx = std::max(4.0 * h.grid.dx, 4.0);
    const double wz = std::max(4.0 * h.grid.dz, 2.0);
    for (int i = 0; i < h.grid.nx; ++i)
      for (int j = 0; j < h.grid.ny; ++j)
        for (int k = 0; k < h.grid.nz; ++k) {
          const double ux = (h.grid.x(i) - h.grid.x(i0)) / wx;
          const double uy = (h.grid.y(j) - h.grid.y(j0)) / wx;
          const double uz = (h.grid.z(k) - h.grid.z(k0)) / wz;
          const double env = std::sin(kPi * (i + 1) / (h.grid.nx + 1)) *
                             std::sin(kPi * (j + 1) / (h.grid.ny + 1)) *
                             std::sin(kPi * (k + 1) / (h.grid.nz + 1));
          guess[h.grid.index(i, j, k)] =
              env + std::exp(-0.5 * (ux * ux + uy * uy + uz * uz));
        }
  }
  EnvelopeSolution sol = detail::lobpcg_ground_state(h, guess, tol, max_iterations);
  sol.wavefunction /= std::sqrt(h.grid.cell_volume());  // continuum norm
  return sol;
}

struct NanoholeProfile {
  double pitch = 2.0;       // nm between lateral samples
  Eigen::MatrixXd depth;    // depth(ix, iy) >= 0, nm

  void validate() const {
    if (depth.rows() < 16 || depth.cols() < 16)
      throw std::domain_error("NanoholeProfile: grid must be at least 16x16");
    if (!(pitch > 0.0)) throw std::domain_error("NanoholeProfile: pitch must be > 0");
    if ((depth.array() < 0.0).any())
      throw std::domain_error("NanoholeProfile: depths must be non-negative");
  }

  double half_span_x() const { return 0.5 * pitch * (depth.rows() - 1); }
  double half_span_y() const { return 0.5 * pitch * (depth.cols() - 1); }
  double max_depth() const { return depth.maxCoeff(); }

  // bilinear sample in centered coordinates; zero outside the scan
  double depth_at(double x, double y) const {
    const double fx = (x + half_span_x()) / pitch;
    const double fy = (y + half_span_y()) / pitch;
    if (fx < 0.0 || fy < 0.0 || fx > depth.rows() - 1 || fy > depth.cols() - 1)
      return 0.0;
    const int i = std::min(static_cast<int>(fx), static_cast<int>(depth.rows()) - 2);
    const int j = std::min(static_cast<int>(fy), static_cast<int>(depth.cols()) - 2);
    const double tx = fx - i, ty = fy - j;
    return (1 - tx) * (1 - ty) * depth(i, j) + tx * (1 - ty) * depth(i + 1, j) +
           (1 - tx) * ty * depth(i, j + 1) + tx * ty * depth(i + 1, j + 1);
  }
};

// Gaussian nanohole resembling a typical droplet-etched AFM scan.
inline NanoholeProfile default_nanohole_profile(int n = 64, double pitch = 2.5,
                                                double depth_nm = 8.0,
                                                double sigma_nm = 22.0) {
  NanoholeProfile p;
  p.pitch = pitch;
  p.depth.resize(n, n);
  const double c = 0.5 * (n - 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = (i - c) * pitch, y = (j - c) * pitch;
      p.depth(i, j) = depth_nm * std::exp(-0.5 * (x * x + y * y) / (sigma_nm * sigma_nm));
    }
  p.validate();
  return p;
}

struct QDGeometry {
  NanoholeProfile profile;
  double fill_height = 3.0;     // nm of nominal GaAs filling
  double al_fraction = 0.25;    // barrier Al content r
  double interface_sigma = 1.5; // nm of interdiffusion smoothing

  void validate() const {
    profile.validate();
    if (!(fill_height > 0.0))
      throw std::domain_error("QDGeometry: fill height must be > 0");
    if (!(al_fraction >= 0.0 && al_fraction <= 1.0))
      throw std::domain_error("QDGeometry: Al fraction must be in [0, 1]");
    if (interface_sigma < 0.0)
      throw std::domain_error("QDGeometry: interface sigma must be >= 0");
  }
};

enum class Band { conduction, valence };

struct PotentialGrids {
  Grid3 grid;
  ArrayXd potential;         // meV relative to the GaAs band edge
  ArrayXd inv_mass;          // 1/(m*/m0)
  ArrayXd barrier_fraction;  // smoothed 1 - (GaAs indicator)
};

namespace detail {

inline void gaussian_smooth_axis(ArrayXd& f, const Grid3& g, int axis,
                                 double sigma) {
  const double d = axis == 0 ? g.dx : axis == 1 ? g.dy : g.dz;
  const int half = static_cast<int>(std::ceil(4.0 * sigma / d));
  if (half < 1) return;
  std::vector<double> kern(2 * half + 1);
  double sum = 0.0;
  for (int t = -half; t <= half; ++t) {
    kern[t + half] = std::exp(-0.5 * (t * d) * (t * d) / (sigma * sigma));
    sum += kern[t + half];
  }
  for (double& kv : kern) kv /= sum;

  const int n[3] = {g.nx, g.ny, g.nz};
  ArrayXd out(f.size());
  const int len = n[axis];
  // iterate over all lines along `axis`
  for (int a = 0; a < (axis == 0 ? 1 : n[0]); ++a)
    for (int b = 0; b < (axis == 1 ? 1 : n[1]); ++b)
      for (int c = 0; c < (axis == 2 ? 1 : n[2]); ++c)
        for (int t = 0; t < len; ++t) {
          const int i = axis == 0 ? t : a;
          const int j = axis == 1 ? t : b;
          const int k = axis == 2 ? t : c;
          double acc = 0.0;
          for (int s = -half; s <= half; ++s) {
            int ts = std::clamp(t + s, 0, len - 1);
            const int is = axis == 0 ? ts : i;
            const int js = axis == 1 ? ts : j;
            const int ks = axis == 2 ? ts : k;
            acc += kern[s + half] * f[g.index(is, js, ks)];
          }
          out[g.index(i, j, k)] = acc;
        }
  f = out;
}

}  // namespace detail

// Simulation box: dot region padded by `pad` nm of barrier on every side.
inline Grid3 make_dot_grid(const QDGeometry& geom, int nx, int ny, int nz,
                           double pad = 15.0) {
  const double d0 = geom.profile.max_depth();
  // lateral extent where the hole is deeper than 5% of the maximum
  double rmax = 0.0;
  for (int i = 0; i < geom.profile.depth.rows(); ++i)
    for (int j = 0; j < geom.profile.depth.cols(); ++j)
      if (geom.profile.depth(i, j) > 0.05 * d0) {
        const double x = (i - 0.5 * (geom.profile.depth.rows() - 1)) * geom.profile.pitch;
        const double y = (j - 0.5 * (geom.profile.depth.cols() - 1)) * geom.profile.pitch;
        rmax = std::max(rmax, std::hypot(x, y));
      }
  const double half_lat = rmax + pad;
  const double z_bot = -d0 - pad;
  const double z_top = std::max(geom.fill_height - d0, 0.0) + pad;
  Grid3 g;
  g.nx = nx;
  g.ny = ny;
  g.nz = nz;
  g.dx = 2.0 * half_lat / (nx + 1);
  g.dy = 2.0 * half_lat / (ny + 1);
  g.dz = (z_top - z_bot) / (nz + 1);
  g.x0 = -half_lat + g.dx;
  g.y0 = -half_lat + g.dy;
  g.z0 = z_bot + g.dz;
  return g;
}

// Band-edge potential, mass grid and barrier indicator for one band.
// GaAs fills the hole from its floor up to the plane z = h - max_depth;
// composition steps are smoothed by a Gaussian of width interface_sigma.
inline PotentialGrids build_potential(const QDGeometry& geom, Band band,
                                      const Grid3& grid) {
  geom.validate();
  PotentialGrids pg;
  pg.grid = grid;
  const Eigen::Index n = grid.size();
  ArrayXd gaas_frac(n);
  const double d0 = geom.profile.max_depth();
  const double z_fill = geom.fill_height - d0;
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.ny; ++j) {
      const double d = geom.profile.depth_at(grid.x(i), grid.y(j));
      for (int k = 0; k < grid.nz; ++k) {
        // overlap fraction of the cell with the GaAs slab [-d, z_fill];
        // keeps the composition smooth in h below the grid resolution
        const double zlo = grid.z(k) - 0.5 * grid.dz;
        const double zhi = grid.z(k) + 0.5 * grid.dz;
        const double ov = std::min(zhi, z_fill) - std::max(zlo, -d);
        gaas_frac[grid.index(i, j, k)] = std::clamp(ov / grid.dz, 0.0, 1.0);
      }
    }
  if (geom.interface_sigma > 0.0) {
    detail::gaussian_smooth_axis(gaas_frac, grid, 0, geom.interface_sigma);
    detail::gaussian_smooth_axis(gaas_frac, grid, 1, geom.interface_sigma);
    detail::gaussian_smooth_axis(gaas_frac, grid, 2, geom.interface_sigma);
  }

  pg.potential.resize(n);
  pg.inv_mass.resize(n);
  pg.barrier_fraction = 1.0 - gaas_frac;
  const MaterialParams& ref = gaas();
  const double ec_ref = ref.VBO + ref.E_g;
  for (Eigen::Index idx = 0; idx < n; ++idx) {
    const double x_al = geom.al_fraction * (1.0 - gaas_frac[idx]);
    const MaterialParams m = material_interp(x_al);
    if (band == Band::conduction) {
      pg.potential[idx] = 1000.0 * (m.VBO + m.E_g - ec_ref);
      pg.inv_mass[idx] = 1.0 / m.m_e;
    } else {
      pg.potential[idx] = 1000.0 * (ref.VBO - m.VBO);
      pg.inv_mass[idx] = 1.0 / m.hole_mass();
    }
  }
  return pg;
}

struct EmissionResult {
  double e_x_eV;
  double lambda_nm;
};

// Trion-to-electron emission: GaAs gap plus both confinement energies minus
// a configurable binding correction.
inline EmissionResult emission_energy(const EnvelopeSolution& e_sol,
                                      const EnvelopeSolution& h_sol,
                                      double binding_meV = 0.0) {
  const double ex = gaas().E_g + 1e-3 * (e_sol.energy + h_sol.energy - binding_meV);
  return {ex, kHc / ex};
}

// Electron g estimate: bulk formula at the confinement-renormalized gap,
// mixed with the barrier bulk g by the barrier occupancy.
inline double electron_g_surrogate(const EnvelopeSolution& e_sol,
                                   const EnvelopeSolution& h_sol,
                                   const QDGeometry& geom) {
  const MaterialParams& g0 = gaas();
  const double eg_eff = g0.E_g + 1e-3 * (e_sol.energy + h_sol.energy);
  const double g_conf = roth_g(g0.E_p, eg_eff, g0.Delta_SO);
  const double g_bulk_barrier = material_interp(geom.al_fraction).g;
  const double pb = e_sol.barrier_occupancy;
  return (1.0 - pb) * g_conf + pb * g_bulk_barrier;
}

struct DotSolverOptions {
  int nx = 56, ny = 56, nz = 56;
  double tol = 1e-7;
  int max_iterations = 1600;
  double binding_meV = 0.0;
  double pad = 12.0;
};

struct DotResult {
  EnvelopeSolution electron;
  EnvelopeSolution hole;
  double e_x_eV = 0.0;
  double lambda_nm = 0.0;
  double g_estimate = 0.0;
};

inline double barrier_occupancy_of(const EnvelopeSolution& sol,
                                   const PotentialGrids& pg) {
  return (sol.wavefunction.square() * pg.barrier_fraction).sum() *
         pg.grid.cell_volume();
}

inline DotResult solve_dot(const QDGeometry& geom, const DotSolverOptions& opt) {
  const Grid3 grid = make_dot_grid(geom, opt.nx, opt.ny, opt.nz, opt.pad);
  DotResult out;
  {
    const PotentialGrids pg = build_potential(geom, Band::conduction, grid);
    out.electron = solve_ground_state({grid, pg.potential, pg.inv_mass}, opt.tol,
                                      opt.max_iterations);
    out.electron.barrier_occupancy = barrier_occupancy_of(out.electron, pg);
  }
  {
    const PotentialGrids pg = build_potential(geom, Band::valence, grid);
    out.hole = solve_ground_state({grid, pg.potential, pg.inv_mass}, opt.tol,
                                  opt.max_iterations);
    out.hole.barrier_occupancy = barrier_occupancy_of(out.hole, pg);
  }
  const EmissionResult em = emission_energy(out.electron, out.hole, opt.binding_meV);
  out.e_x_eV = em.e_x_eV;
  out.lambda_nm = em.lambda_nm;
  out.g_estimate = electron_g_surrogate(out.electron, out.hole, geom);
  return out;
}

struct SweepRow {
  double h_nm;
  double r;
  double lambda_nm = 0.0;
  double g_estimate = 0.0;
  double barrier_occupancy = 0.0;
  bool ok = false;
  std::string message;  // failure reason for missing rows
};

// Full (h, r) grid, rows ordered by (h, then r). Cells run concurrently;
// the merge order is fixed by the cell index.
inline std::vector<SweepRow> design_sweep(const NanoholeProfile& profile,
                                          const std::vector<double>& h_values,
                                          const std::vector<double>& r_values,
                                          const DotSolverOptions& opt,
                                          int threads = 0) {
  if (h_values.empty() || r_values.empty())
    throw std::domain_error("design_sweep: empty parameter ranges");
  const size_t cells = h_values.size() * r_values.size();
  std::vector<SweepRow> rows(cells);
  std::atomic<size_t> next{0};
  const int nthreads =
      threads > 0 ? threads
                  : std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                    static_cast<unsigned>(cells)));
  auto worker = [&]() {
    for (;;) {
      const size_t c = next.fetch_add(1);
      if (c >= cells) return;
      const size_t ih = c / r_values.size();
      const size_t ir = c % r_values.size();
      SweepRow row;
      row.h_nm = h_values[ih];
      row.r = r_values[ir];
      try {
        QDGeometry geom;
        geom.profile = profile;
        geom.fill_height = row.h_nm;
        geom.al_fraction = row.r;
        const DotResult res = solve_dot(geom, opt);
        row.lambda_nm = res.lambda_nm;
        row.g_estimate = res.g_estimate;
        row.barrier_occupancy = res.electron.barrier_occupancy;
        row.ok = true;
      } catch (const std::exception& e) {
        row.ok = false;
        row.message = e.what();
      }
      rows[c] = std::move(row);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return rows;
}

// ---- profile CSV (header: x_nm,y_nm,depth_nm; uniform grid required) ----

inline void save_profile_csv(const NanoholeProfile& p, std::ostream& os) {
  os << "x_nm,y_nm,depth_nm\n";
  char buf[96];
  for (int i = 0; i < p.depth.rows(); ++i)
    for (int j = 0; j < p.depth.cols(); ++j) {
      const double x = (i - 0.5 * (p.depth.rows() - 1)) * p.pitch;
      const double y = (j - 0.5 * (p.depth.cols() - 1)) * p.pitch;
      std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g\n", x, y, p.depth(i, j));
      os << buf;
    }
}

inline NanoholeProfile load_profile_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line))
    throw std::runtime_error("profile: empty file");
  while (!line.empty() && (line[0] == '#')) std::getline(is, line);
  if (line.find("x_nm") == std::string::npos)
    throw std::runtime_error("profile: expected header x_nm,y_nm,depth_nm");
  std::vector<double> xs, ys, ds;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    double x, y, d;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &x, &y, &d) != 3)
      throw std::runtime_error("profile: bad row: " + line);
    xs.push_back(x);
    ys.push_back(y);
    ds.push_back(d);
  }
  std::vector<double> ux = xs, uy = ys;
  std::sort(ux.begin(), ux.end());
  ux.erase(std::unique(ux.begin(), ux.end()), ux.end());
  std::sort(uy.begin(), uy.end());
  uy.erase(std::unique(uy.begin(), uy.end()), uy.end());
  if (ux.size() < 2 || uy.size() < 2 || ux.size() * uy.size() != xs.size())
    throw std::runtime_error("profile: grid is not a complete rectangle");
  const double px = ux[1] - ux[0];
  for (size_t i = 1; i < ux.size(); ++i)
    if (std::abs(ux[i] - ux[i - 1] - px) > 1e-6 * px)
      throw std::runtime_error("profile: x grid is not uniform");
  const double py = uy[1] - uy[0];
  for (size_t i = 1; i < uy.size(); ++i)
    if (std::abs(uy[i] - uy[i - 1] - py) > 1e-6 * py)
      throw std::runtime_error("profile: y grid is not uniform");
  if (std::abs(px - py) > 1e-6 * px)
    throw std::runtime_error("profile: x and y pitch differ");
  NanoholeProfile p;
  p.pitch = px;
  p.depth = Eigen::MatrixXd::Zero(ux.size(), uy.size());
  auto find_idx = [](const std::vector<double>& v, double val, double pitch) {
    return static_cast<int>(std::lround((val - v.front()) / pitch));
  };
  for (size_t t = 0; t < xs.size(); ++t)
    p.depth(find_idx(ux, xs[t], px), find_idx(uy, ys[t], py)) = ds[t];
  p.validate();
  return p;
}

}  // namespace qd
