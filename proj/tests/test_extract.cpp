#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "qd/extract.hpp"

using namespace qd;

namespace {

Spectrum synth_doublet(double c1, double c2, double sigma, double a1, double a2,
                       double lo, double hi, int n, double noise_rel,
                       unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Spectrum s;
  const double peak = std::max(a1, a2);
  for (int i = 0; i < n; ++i) {
    const double e = lo + (hi - lo) * i / (n - 1);
    const double u1 = (e - c1) / sigma, u2 = (e - c2) / sigma;
    double y = a1 * std::exp(-0.5 * u1 * u1) + a2 * std::exp(-0.5 * u2 * u2);
    if (noise_rel > 0.0) y = std::max(0.0, y + noise_rel * peak * gauss(rng));
    s.energy.push_back(e);
    s.counts.push_back(y);
  }
  return s;
}

}  // namespace

TEST_CASE("double gaussian fit recovers synthetic doublets") {
  SUBCASE("noiseless is essentially exact") {
    const Spectrum s = synth_doublet(-70.0, 70.0, 44.0, 900.0, 700.0, -300.0,
                                     300.0, 601, 0.0, 0);
    const DoubleGaussianFit f = fit_double_gaussian(s, -50.0, 50.0);
    CHECK(f.c1 == doctest::Approx(-70.0).epsilon(1e-7));
    CHECK(f.c2 == doctest::Approx(70.0).epsilon(1e-7));
    CHECK(f.sigma == doctest::Approx(44.0).epsilon(1e-7));
    CHECK(f.amp1 == doctest::Approx(900.0).epsilon(1e-6));
  }
  SUBCASE("snr 100 keeps centers within sigma/20") {
    const Spectrum s = synth_doublet(-70.0, 70.0, 44.0, 1000.0, 800.0, -300.0,
                                     300.0, 601, 0.01, 42);
    const DoubleGaussianFit f = fit_double_gaussian(s, -90.0, 90.0);
    CHECK(std::abs(f.c1 + 70.0) < 44.0 / 20.0);
    CHECK(std::abs(f.c2 - 70.0) < 44.0 / 20.0);
  }
  SUBCASE("single gaussian input raises the unresolved-doublet error") {
    const Spectrum s = synth_doublet(0.0, 0.0, 44.0, 500.0, 500.0, -300.0,
                                     300.0, 401, 0.0, 0);
    CHECK_THROWS_AS(fit_double_gaussian(s, -30.0, 30.0), unresolved_doublet_error);
  }
  SUBCASE("initial centers must lie inside the grid") {
    const Spectrum s = synth_doublet(-70.0, 70.0, 44.0, 1.0, 1.0, -300.0,
                                     300.0, 101, 0.0, 0);
    CHECK_THROWS_AS(fit_double_gaussian(s, -500.0, 50.0), std::domain_error);
  }
}

TEST_CASE("quoted cross-section regenerates and refits") {
  // sigma = 44 ueV doublet at 1.687580 / 1.687720 eV, alpha = 90 degrees
  const double c1 = 1.687580e6, c4 = 1.687720e6;
  const Spectrum s = synth_doublet(c1, c4, 44.0, 1000.0, 950.0, c1 - 250.0,
                                   c4 + 250.0, 801, 0.005, 7);
  const DoubleGaussianFit f = fit_double_gaussian(s, c1 - 20.0, c4 + 20.0);
  CHECK(std::abs(f.c1 - c1) < 1.0);
  CHECK(std::abs(f.c2 - c4) < 1.0);
  CHECK(f.sigma == doctest::Approx(44.0).epsilon(0.05));
}

TEST_CASE("g factors from the quoted centers") {
  const GFactorEstimate g =
      g_from_centers(1.687580, 1.687660, 1.687710, 1.687720, 6.0);
  CHECK(g.g_e_abs == doctest::Approx(0.129570).epsilon(1e-4));
  CHECK(g.g_t_abs == doctest::Approx(0.273537).epsilon(1e-4));
  // consistent with the reported 0.12(5) / 0.25(5)
  CHECK(std::abs(g.g_e_abs - 0.12) < 0.05);
  CHECK(std::abs(g.g_t_abs - 0.25) < 0.05);
  CHECK(g_from_centers(1.0, 1.0, 1.0, 1.0, 5.0).g_e_abs == doctest::Approx(0.0));
  CHECK_THROWS_AS(g_from_centers(1.0, 1.0, 1.0, 1.0, 0.0), std::domain_error);
}

TEST_CASE("extraction inverts the forward energy ladder") {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(0.01, 0.5);
  for (int i = 0; i < 200; ++i) {
    double ge = u(rng), gt = u(rng);
    if (ge > gt) std::swap(ge, gt);  // assignment assumes |g_e| < |g_t|
    const double b = 1.0 + 10.0 * u(rng);
    const double we = ge * kMuB * b, wt = gt * kMuB * b;
    const EnergyLadder l = transition_energies(0.0, we, wt);
    const GFactorEstimate est =
        g_from_centers(l.energies[0] * 1e-6, l.energies[1] * 1e-6,
                       l.energies[2] * 1e-6, l.energies[3] * 1e-6, b);
    CHECK(est.g_e_abs == doctest::Approx(ge).epsilon(1e-12));
    CHECK(est.g_t_abs == doctest::Approx(gt).epsilon(1e-12));
    // a realistic optical carrier costs a few digits to cancellation
    const EnergyLadder lc = transition_energies(1.687e6, we, wt);
    const GFactorEstimate estc =
        g_from_centers(lc.energies[0] * 1e-6, lc.energies[1] * 1e-6,
                       lc.energies[2] * 1e-6, lc.energies[3] * 1e-6, b);
    CHECK(estc.g_e_abs == doctest::Approx(ge).epsilon(1e-8));
    CHECK(estc.g_t_abs == doctest::Approx(gt).epsilon(1e-8));
  }
  // with the opposite magnitude ordering the two estimates swap; the pair
  // is still recovered exactly
  const EnergyLadder l = transition_energies(0.0, 40.0, 10.0);
  const GFactorEstimate est =
      g_from_centers(l.energies[0] * 1e-6, l.energies[1] * 1e-6,
                     l.energies[2] * 1e-6, l.energies[3] * 1e-6, 1.0);
  CHECK(est.g_e_abs * kMuB == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(est.g_t_abs * kMuB == doctest::Approx(40.0).epsilon(1e-12));
}

TEST_CASE("area-based rectilinear estimates") {
  CHECK(rectilinear_stokes_from_areas(17.0, 3.0) == doctest::Approx(0.85));
  CHECK(rectilinear_stokes_from_areas(5.0, 0.0) == doctest::Approx(1.0));
  CHECK(rectilinear_stokes_from_areas(4.0, 4.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(rectilinear_stokes_from_areas(0.0, 0.0), std::domain_error);
  CHECK(linear_polarization_contrast(17.0, 3.0) == doctest::Approx(0.7));
}

TEST_CASE("fss cosine fit") {
  auto make_series = [](double fss, double eta, double off, int n, double span) {
    PolarizationSeries s;
    for (int i = 0; i < n; ++i) {
      const double b = span * i / (n - 1);
      s.angle.push_back(b);
      s.value.push_back(off + 0.5 * fss * std::cos(2.0 * (b - eta)));
    }
    return s;
  };
  SUBCASE("quoted-amplitude series") {
    const double fss = 3.0 * kPlanckH;  // 3 GHz in ueV
    const double eta = 71.0 * kPi / 180.0;
    const FssFit f = fss_fit(make_series(fss, eta, 1.687e6, 36, 2.0 * kPi));
    CHECK(!f.zero_fss);
    CHECK(f.fss == doctest::Approx(fss).epsilon(0.02));
    CHECK(std::abs(f.eta - eta) < kPi / 180.0);
  }
  SUBCASE("flat series flags zero fss") {
    PolarizationSeries s;
    for (int i = 0; i < 16; ++i) {
      s.angle.push_back(kPi * 2.0 * i / 15);
      s.value.push_back(5.0);
    }
    const FssFit f = fss_fit(s);
    CHECK(f.zero_fss);
    CHECK(std::isnan(f.eta));
  }
  SUBCASE("phase equivariance") {
    const double fss = 8.0, eta = 0.4;
    for (double delta : {0.2, 0.9, 2.0}) {
      PolarizationSeries s;
      for (int i = 0; i < 24; ++i) {
        const double b = 2.0 * kPi * i / 23;
        s.angle.push_back(b + delta);
        s.value.push_back(3.0 + 0.5 * fss * std::cos(2.0 * (b - eta)));
      }
      const FssFit f = fss_fit(s);
      CHECK(axis_distance(f.eta, eta + delta) < 1e-9);
    }
  }
  SUBCASE("random round trips") {
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double max_fss_err = 0.0, max_eta_err = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const double fss = 0.5 + 20.0 * u(rng);
      const double eta = kPi * u(rng);
      const double off = 10.0 * u(rng);
      const FssFit f = fss_fit(make_series(fss, eta, off, 24, 1.5 * kPi));
      max_fss_err = std::max(max_fss_err, std::abs(f.fss - fss) / fss);
      max_eta_err = std::max(max_eta_err, axis_distance(f.eta, eta));
    }
    CHECK(max_fss_err < 1e-9);
    CHECK(max_eta_err < 1e-9);
  }
  SUBCASE("validation") {
    PolarizationSeries s;
    for (int i = 0; i < 8; ++i) {
      s.angle.push_back(0.1 * i);  // spans less than pi
      s.value.push_back(1.0);
    }
    CHECK_THROWS_AS(fss_fit(s), std::domain_error);
    PolarizationSeries few;
    for (int i = 0; i < 6; ++i) {
      few.angle.push_back(0.7 * i);
      few.value.push_back(1.0);
    }
    CHECK_THROWS_AS(fss_fit(few), std::domain_error);
  }
}

TEST_CASE("synthetic rf map") {
  const FieldConfiguration f(5.8, 0.5 * kPi, 0.0);
  HoleMixModel hm;
  hm.params = HoleMixingParameters(1.28, 0.0867, 0.0, kPlanckH * 750.0);
  const TransitionSet set =
      build_transition_set(GTensor::isotropic(0.08), f, hm, 0.0);

  std::vector<double> vg, om;
  for (int i = 0; i <= 40; ++i) vg.push_back(0.80 + 0.01 * i);
  for (int i = 0; i <= 2400; ++i) om.push_back(-60.0 + 0.05 * i);
  const std::vector<std::pair<double, double>> windows = {{0.90, 1.00}};

  SUBCASE("zero stark slope gives vertical ridges at the line energies") {
    const RfMap map = synth_rf_map(set, 0.0, windows, 0.72 * kPlanckH, vg, om);
    // dark outside the window
    CHECK(map.intensity.row(0).maxCoeff() == 0.0);
    // at a bright voltage, local maxima sit at the four energies
    const Eigen::VectorXd cut = map.intensity.row(15);
    for (const Transition& t : set.lines) {
      const size_t i = static_cast<size_t>(
          std::lround((t.energy - om.front()) / (om[1] - om[0])));
      CHECK(cut(i) >= cut(i - 2));
      CHECK(cut(i) >= cut(i + 2));
    }
  }
  SUBCASE("ridge centers at fixed gate support the g extraction") {
    const RfMap map = synth_rf_map(set, 4.0, windows, 0.3, vg, om);
    const size_t iv = 20;
    const double shift = 4.0 * kPlanckH * (vg[iv] - 0.0);
    // local-maximum scan along omega
    std::vector<double> peaks;
    for (size_t i = 1; i + 1 < om.size(); ++i) {
      const double y = map.intensity(iv, i);
      if (y > 0.5 && y >= map.intensity(iv, i - 1) && y > map.intensity(iv, i + 1))
        peaks.push_back(om[i]);
    }
    REQUIRE(peaks.size() == 4);
    const GFactorEstimate est = g_from_centers(
        (peaks[0] - shift) * 1e-6, (peaks[1] - shift) * 1e-6,
        (peaks[2] - shift) * 1e-6, (peaks[3] - shift) * 1e-6, 5.8);
    CHECK(est.g_e_abs == doctest::Approx(0.08).epsilon(2e-3));
    CHECK(est.g_t_abs == doctest::Approx(1.5 * 0.0867).epsilon(2e-3));
  }
  SUBCASE("validation") {
    CHECK_THROWS_AS(synth_rf_map(set, 0.0, {}, 1.0, vg, om), std::domain_error);
    CHECK_THROWS_AS(synth_rf_map(set, 0.0, windows, 0.0, vg, om), std::domain_error);
  }
}

TEST_CASE("spectrum csv loader") {
  std::stringstream ev("energy_eV,counts\n1.6875,10\n1.6876,20\n1.6877,15\n1.6878,5\n");
  const Spectrum a = load_spectrum_csv(ev);
  CHECK(a.energy[0] == doctest::Approx(1.6875e6));
  std::stringstream uev("energy_ueV,counts\n1,1\n2,2\n3,3\n4,4\n");
  const Spectrum b = load_spectrum_csv(uev);
  CHECK(b.energy[3] == doctest::Approx(4.0));
  std::stringstream bad("energy_nm,counts\n1,1\n");
  CHECK_THROWS_AS(load_spectrum_csv(bad), std::runtime_error);
  std::stringstream nonmono("energy_ueV,counts\n1,1\n1,2\n2,3\n3,4\n");
  CHECK_THROWS_AS(load_spectrum_csv(nonmono), std::domain_error);
}
