#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "qd/envelope.hpp"

using namespace qd;

namespace {

HamiltonianGrid particle_in_box(double L, double m, int n) {
  const double dx = L / (n + 1);
  Grid3 g;
  g.nx = g.ny = g.nz = n;
  g.dx = g.dy = g.dz = dx;
  g.x0 = g.y0 = g.z0 = dx;
  return {g, ArrayXd::Zero(g.size()), ArrayXd::Constant(g.size(), 1.0 / m)};
}

double box_exact(double L, double m) {
  return 3.0 * kPi * kPi * kHbar2Over2m0 / (m * L * L);
}

}  // namespace

TEST_CASE("material interpolation") {
  const MaterialParams g0 = material_interp(0.0);
  CHECK(g0.E_g == doctest::Approx(1.519).epsilon(1e-14));
  CHECK(g0.g == doctest::Approx(-0.44).epsilon(1e-14));
  CHECK(g0.kappa == doctest::Approx(1.28).epsilon(1e-14));
  const MaterialParams a1 = material_interp(1.0);
  CHECK(a1.E_g == doctest::Approx(3.099).epsilon(1e-14));
  CHECK(a1.VBO == doctest::Approx(-1.32).epsilon(1e-14));
  CHECK(material_interp(0.25).E_g == doctest::Approx(1.87696875).epsilon(1e-12));
  // continuity at a fine step
  const double e1 = material_interp(0.499999).E_g;
  const double e2 = material_interp(0.500001).E_g;
  CHECK(std::abs(e1 - e2) < 1e-5);
  CHECK_THROWS_AS(material_interp(-0.01), std::domain_error);
  CHECK_THROWS_AS(material_interp(1.01), std::domain_error);
  CHECK(gaas().hole_mass() == doctest::Approx(1.0 / (6.98 - 2.0 * 2.06)).epsilon(1e-14));
  // stored-only columns survive interpolation too
  CHECK(gaas().e14 == doctest::Approx(-0.205).epsilon(1e-14));
  CHECK(alas().c44 == doctest::Approx(542.0).epsilon(1e-14));
  CHECK(material_interp(0.5).B124 == doctest::Approx(-2.9).epsilon(1e-12));
}

TEST_CASE("box oracle") {
  const double L = 10.0, m = 0.0665;
  const HamiltonianGrid h = particle_in_box(L, m, 29);
  const EnvelopeSolution s = solve_ground_state(h, 1e-8);
  CHECK(s.energy == doctest::Approx(box_exact(L, m)).epsilon(0.01));
  // continuum normalization
  CHECK((s.wavefunction.square().sum() * h.grid.cell_volume()) ==
        doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("harmonic oracle") {
  const double m = 0.0665, hw = 10.0;
  const int n = 61;
  const double dx = 80.0 / (n - 1);
  Grid3 g;
  g.nx = g.ny = g.nz = n;
  g.dx = g.dy = g.dz = dx;
  g.x0 = g.y0 = g.z0 = -40.0;
  ArrayXd v(g.size());
  const double c = hw * hw / (4.0 * kHbar2Over2m0 / m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        v[g.index(i, j, k)] = c * (g.x(i) * g.x(i) + g.y(j) * g.y(j) + g.z(k) * g.z(k));
  const EnvelopeSolution s =
      solve_ground_state({g, v, ArrayXd::Constant(g.size(), 1.0 / m)}, 1e-8);
  CHECK(s.energy == doctest::Approx(1.5 * hw).epsilon(0.01));
}

TEST_CASE("grid refinement converges at second order") {
  const double L = 10.0, m = 0.0665;
  const double e1 = solve_ground_state(particle_in_box(L, m, 14), 1e-9).energy;
  const double e2 = solve_ground_state(particle_in_box(L, m, 29), 1e-9).energy;
  const double e3 = solve_ground_state(particle_in_box(L, m, 59), 1e-9).energy;
  const double d12 = std::abs(e2 - e1);
  const double d23 = std::abs(e3 - e2);
  CHECK(d23 < d12);
  CHECK(d12 / d23 == doctest::Approx(4.0).epsilon(0.35));
}

TEST_CASE("solver failure reports the residual") {
  const HamiltonianGrid h = particle_in_box(10.0, 0.0665, 19);
  CHECK_THROWS_AS(solve_ground_state(h, 1e-12, 2), convergence_error);
  CHECK_THROWS_AS(solve_ground_state(h, 0.0), std::domain_error);
}

TEST_CASE("band-edge offsets at r = 0.25") {
  QDGeometry geom;
  geom.profile = default_nanohole_profile(16, 8.0);  // coarse, small
  geom.fill_height = 3.0;
  geom.al_fraction = 0.25;
  geom.interface_sigma = 0.0;  // band-edge arithmetic needs sharp interfaces
  const Grid3 g = make_dot_grid(geom, 24, 24, 24);
  const PotentialGrids pc = build_potential(geom, Band::conduction, g);
  CHECK(pc.potential.maxCoeff() == doctest::Approx(227.97).epsilon(1e-3));
  CHECK(pc.potential.minCoeff() == doctest::Approx(0.0).epsilon(1e-9));
  const PotentialGrids pv = build_potential(geom, Band::valence, g);
  CHECK(pv.potential.maxCoeff() == doctest::Approx(130.0).epsilon(1e-3));

  QDGeometry flat = geom;
  flat.al_fraction = 0.0;
  const PotentialGrids pf = build_potential(flat, Band::conduction, g);
  CHECK(pf.potential.maxCoeff() < 1e-9);  // no confinement

  QDGeometry steps = geom;
  steps.interface_sigma = 0.0;
  const PotentialGrids ps = build_potential(steps, Band::conduction, g);
  // without smoothing, cells away from interfaces are pure
  int pure = 0;
  for (Eigen::Index i = 0; i < ps.barrier_fraction.size(); ++i)
    if (ps.barrier_fraction[i] == 0.0 || ps.barrier_fraction[i] == 1.0) ++pure;
  CHECK(pure > ps.barrier_fraction.size() * 9 / 10);
}

TEST_CASE("geometry validation") {
  QDGeometry geom;
  geom.profile = default_nanohole_profile(16, 8.0);
  geom.fill_height = 0.0;
  CHECK_THROWS_AS(geom.validate(), std::domain_error);
  geom.fill_height = 3.0;
  geom.al_fraction = 1.5;
  CHECK_THROWS_AS(geom.validate(), std::domain_error);
  NanoholeProfile tiny;
  tiny.depth = Eigen::MatrixXd::Zero(8, 8);
  CHECK_THROWS_AS(tiny.validate(), std::domain_error);
}

TEST_CASE("taller fill lowers the electron confinement energy") {
  DotSolverOptions opt;
  opt.nx = opt.ny = opt.nz = 32;
  QDGeometry geom;
  geom.profile = default_nanohole_profile(32, 5.0);
  geom.al_fraction = 0.25;
  geom.fill_height = 3.0;
  const DotResult a = solve_dot(geom, opt);
  geom.fill_height = 6.0;
  const DotResult b = solve_dot(geom, opt);
  CHECK(b.electron.energy < a.electron.energy);
  CHECK(b.lambda_nm > a.lambda_nm);
}

TEST_CASE("emission energy arithmetic") {
  EnvelopeSolution e, h;
  e.energy = 60.0;
  h.energy = 31.0;
  const EmissionResult em = emission_energy(e, h);
  CHECK(em.e_x_eV == doctest::Approx(1.610).epsilon(1e-12));
  CHECK(em.lambda_nm == doctest::Approx(770.088).epsilon(1e-4));
  e.energy = h.energy = 0.0;
  CHECK(emission_energy(e, h).lambda_nm == doctest::Approx(816.222).epsilon(1e-4));
}

TEST_CASE("g surrogate reduces to the bulk formula without confinement") {
  EnvelopeSolution e, h;
  e.energy = h.energy = 0.0;
  e.barrier_occupancy = 0.0;
  QDGeometry geom;
  geom.profile = default_nanohole_profile(16, 8.0);
  CHECK(electron_g_surrogate(e, h, geom) == doctest::Approx(-0.317314).epsilon(1e-4));
}

TEST_CASE("design sweep consistency, ordering and determinism") {
  DotSolverOptions opt;
  opt.nx = opt.ny = opt.nz = 28;
  const NanoholeProfile prof = default_nanohole_profile(32, 5.0);
  const std::vector<double> hs = {3.0, 5.0};
  const std::vector<double> rs = {0.2, 0.3};
  const auto rows = design_sweep(prof, hs, rs, opt, 4);
  REQUIRE(rows.size() == 4);
  // (h, r) ordering
  CHECK(rows[0].h_nm == 3.0);
  CHECK(rows[0].r == 0.2);
  CHECK(rows[1].r == 0.3);
  CHECK(rows[2].h_nm == 5.0);
  for (const auto& r : rows) CHECK(r.ok);

  // single cell equals the direct pipeline call
  QDGeometry geom;
  geom.profile = prof;
  geom.fill_height = 3.0;
  geom.al_fraction = 0.2;
  const DotResult direct = solve_dot(geom, opt);
  CHECK(rows[0].lambda_nm == doctest::Approx(direct.lambda_nm).epsilon(1e-12));
  CHECK(rows[0].g_estimate == doctest::Approx(direct.g_estimate).epsilon(1e-12));

  // lambda grows with h at fixed r
  CHECK(rows[2].lambda_nm > rows[0].lambda_nm);
  CHECK(rows[3].lambda_nm > rows[1].lambda_nm);

  // thread count does not change results
  const auto rows1 = design_sweep(prof, hs, rs, opt, 1);
  for (size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].lambda_nm == rows1[i].lambda_nm);
    CHECK(rows[i].g_estimate == rows1[i].g_estimate);
  }
}

TEST_CASE("sweep records per-cell failures") {
  DotSolverOptions opt;
  opt.nx = opt.ny = opt.nz = 24;
  opt.max_iterations = 1;  // forces convergence failures
  const auto rows =
      design_sweep(default_nanohole_profile(16, 8.0), {3.0}, {0.25}, opt, 1);
  REQUIRE(rows.size() == 1);
  CHECK(!rows[0].ok);
  CHECK(!rows[0].message.empty());
}

TEST_CASE("profile csv round trip") {
  const NanoholeProfile p = default_nanohole_profile(20, 3.0);
  std::stringstream ss;
  save_profile_csv(p, ss);
  ss.seekg(0);
  const NanoholeProfile q = load_profile_csv(ss);
  CHECK(q.pitch == doctest::Approx(p.pitch).epsilon(1e-12));
  REQUIRE(q.depth.rows() == p.depth.rows());
  CHECK((q.depth - p.depth).cwiseAbs().maxCoeff() < 1e-9);

  std::stringstream bad("x_nm,y_nm,depth_nm\n0,0,1\n1,0,1\n0,1,1\n");
  CHECK_THROWS_AS(load_profile_csv(bad), std::runtime_error);
}
