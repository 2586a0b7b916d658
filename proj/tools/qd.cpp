// Command-line front end: transition tables, polarization maps, dragging
// scans, sign inference, design sweeps and spectrum analysis.

#include <CLI11.hpp>
#include <array>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qd/envelope.hpp"
#include "qd/extract.hpp"
#include "qd/holemix.hpp"
#include "qd/hyperfine.hpp"
#include "qd/io.hpp"
#include "qd/optics.hpp"
#include "qd/spin.hpp"

namespace {

using namespace qd;

constexpr double kDeg = kPi / 180.0;

struct FieldArgs {
  double B = 5.8;
  double chi_deg = 90.0;
  double phi_deg = 0.0;

  void attach(CLI::App* app) {
    app->add_option("--B", B, "magnetic field, tesla");
    app->add_option("--chi-deg", chi_deg, "polar angle from [001], degrees");
    app->add_option("--phi-deg", phi_deg, "azimuth from [100], degrees");
  }
  FieldConfiguration field() const {
    return FieldConfiguration(B, chi_deg * kDeg, phi_deg * kDeg);
  }
};

struct HoleArgs {
  std::string model = "gtensor";  // gtensor | mix
  double gt = 0.13;
  double gt_z = 0.3;
  double gt_dperp = 0.0;
  double q = 0.12;
  double t = 0.0;
  double kappa = 1.28;
  double delta_lh_ghz = 750.0;
  std::string terms = "q";  // subset of {z3,q,t}, comma separated

  void attach(CLI::App* app) {
    app->add_option("--hole-model", model, "trion model: gtensor or mix")
        ->check(CLI::IsMember({"gtensor", "mix"}));
    app->add_option("--gt", gt, "trion in-plane g (gtensor model)");
    app->add_option("--gt-z", gt_z, "trion out-of-plane g (gtensor model)");
    app->add_option("--gt-dperp", gt_dperp, "trion in-plane anisotropy");
    app->add_option("--q", q, "effective anisotropic Zeeman constant (mix model)");
    app->add_option("--t-coupling", t, "HH-LH coupling constant (mix model)");
    app->add_option("--kappa", kappa, "isotropic Zeeman constant (mix model)");
    app->add_option("--delta-lh-ghz", delta_lh_ghz, "HH-LH splitting / 2pi, GHz");
    app->add_option("--terms", terms, "enabled mix terms, e.g. q,t,z3");
  }

  HoleModel hole() const {
    if (model == "gtensor") return GTensor(gt_z, gt, gt_dperp);
    HoleMixModel hm;
    hm.params = HoleMixingParameters(kappa, q, t, delta_lh_ghz * kPlanckH);
    hm.enabled.clear();
    std::stringstream ss(terms);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok == "q") hm.enabled.push_back(MixingKind::non_zeeman_q);
      else if (tok == "t") hm.enabled.push_back(MixingKind::hh_lh_t);
      else if (tok == "z3") hm.enabled.push_back(MixingKind::third_order_zeeman);
      else throw CLI::ValidationError("--terms", "unknown term: " + tok);
    }
    if (hm.enabled.empty())
      throw CLI::ValidationError("--terms", "no mixing terms enabled");
    return hm;
  }
};

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  return os;
}

int run_transitions(const FieldArgs& fa, const HoleArgs& ha, double ge,
                    double ge_z, double ge_dperp, double omega_center,
                    const std::string& out, uint64_t hash) {
  const GTensor g_e(ge_z, ge, ge_dperp);
  const TransitionSet set =
      build_transition_set(g_e, fa.field(), ha.hole(), omega_center);
  std::ostringstream table;
  table << "omega_e_ueV," << format_g(set.omega_e) << "\n";
  table << "omega_t_ueV," << format_g(set.omega_t) << "\n";
  table << "line,energy_ueV,ground_spin,s0,s1,s2,s3\n";
  for (int i = 0; i < 4; ++i) {
    const Transition& t = set.lines[i];
    table << "E" << i + 1 << "," << format_g(t.energy) << ","
          << ground_spin_char(t.ground_spin) << "," << format_g(t.stokes.s0)
          << "," << format_g(t.stokes.s1) << "," << format_g(t.stokes.s2) << ","
          << format_g(t.stokes.s3) << "\n";
  }
  if (!out.empty()) {
    std::ofstream os = open_out(out);
    write_csv_stamp(os, hash);
    os << table.str();
  }
  std::cout << table.str();
  return 0;
}

int run_polmap(const FieldArgs& fa, const HoleArgs& ha, double ge, double ge_z,
               int n_phi, int n_alpha, const std::string& out, uint64_t hash) {
  if (n_phi < 1 || n_alpha < 1)
    throw CLI::ValidationError("--n-phi/--n-alpha", "grids must be positive");
  std::vector<double> phis, alphas;
  for (int i = 0; i < n_phi; ++i) phis.push_back(2.0 * kPi * i / n_phi);
  for (int i = 0; i < n_alpha; ++i) alphas.push_back(2.0 * kPi * i / n_alpha);
  if (n_phi == 1) phis = {fa.phi_deg * kDeg};
  const auto rows = polarization_map(GTensor(ge_z, ge), fa.B, fa.chi_deg * kDeg,
                                     ha.hole(), phis, alphas);
  std::ofstream os = open_out(out);
  write_csv_stamp(os, hash);
  os << "phi_rad,alpha_rad,transition,rate_norm\n";
  for (const auto& r : rows)
    os << format_g(r.phi) << "," << format_g(r.alpha) << "," << r.transition
       << "," << format_g(r.rate_norm) << "\n";
  std::cout << "wrote " << rows.size() << " rows to " << out << "\n";
  return 0;
}

int run_dragscan(const NuclearBathParameters& bath, const std::string& spin,
                 const SweepSpec& base, const std::string& direction,
                 const std::string& out, uint64_t hash) {
  const GroundSpin gs = spin == "up" ? GroundSpin::up : GroundSpin::down;
  std::vector<DragScan> scans;
  if (direction == "up" || direction == "both") {
    SweepSpec s = base;
    s.direction = SweepDirection::up;
    scans.push_back(drag_sweep(bath, gs, s));
  }
  if (direction == "down" || direction == "both") {
    SweepSpec s = base;
    s.direction = SweepDirection::down;
    scans.push_back(drag_sweep(bath, gs, s));
  }
  std::ofstream os = open_out(out);
  write_csv_stamp(os, hash);
  os << "omega_L_ueV,intensity,I_x,direction\n";
  for (const DragScan& sc : scans) {
    const char* d = sc.direction == SweepDirection::up ? "up" : "down";
    for (size_t i = 0; i < sc.omega_L.size(); ++i)
      os << format_g(sc.omega_L[i]) << "," << format_g(sc.intensity[i]) << ","
         << format_g(sc.I_x_trace[i]) << "," << d << "\n";
  }
  if (scans.size() == 2) {
    const LineshapeClass c = classify_lineshape(scans[0], scans[1]);
    std::cout << "lineshape: " << lineshape_char(c) << "\n";
  }
  std::cout << "wrote " << out << "\n";
  return 0;
}

int run_infer_signs(int tdm_parallel, const std::string& labels,
                    const std::string& order) {
  if (labels.size() != 4)
    throw CLI::ValidationError("--labels", "need four letters from {D,A}");
  std::array<LineshapeClass, 4> l{};
  for (int i = 0; i < 4; ++i) {
    if (labels[i] == 'D') l[i] = LineshapeClass::dragging;
    else if (labels[i] == 'A') l[i] = LineshapeClass::antidragging;
    else throw CLI::ValidationError("--labels", "labels must be D or A");
  }
  const MagnitudeOrder mo = order == "e<t" ? MagnitudeOrder::electron_smaller
                                           : MagnitudeOrder::electron_larger;
  const SignPair s = infer_signs(tdm_parallel != 0, l, mo);
  std::cout << "sign_g_perp_e," << (s.sign_e > 0 ? "+1" : "-1") << "\n"
            << "sign_g_perp_t," << (s.sign_t > 0 ? "+1" : "-1") << "\n";
  return 0;
}

int run_sweep(const std::string& profile_path, double h_min, double h_max,
              int h_steps, double r_min, double r_max, int r_steps, int grid_n,
              double tol, int threads, const std::string& out, uint64_t hash) {
  NanoholeProfile prof;
  if (profile_path == "default") {
    prof = default_nanohole_profile();
  } else {
    std::ifstream is(profile_path);
    if (!is) throw std::runtime_error("cannot open profile: " + profile_path);
    prof = load_profile_csv(is);
  }
  auto linspace = [](double a, double b, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i)
      v.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
    return v;
  };
  DotSolverOptions opt;
  opt.nx = opt.ny = opt.nz = grid_n;
  opt.tol = tol;
  const auto rows = design_sweep(prof, linspace(h_min, h_max, h_steps),
                                 linspace(r_min, r_max, r_steps), opt, threads);
  std::ofstream os = open_out(out);
  write_csv_stamp(os, hash);
  os << "h_nm,r,lambda_nm,g_e_estimate,barrier_occupancy\n";
  int failed = 0;
  for (const auto& r : rows) {
    if (!r.ok) {
      os << "# missing " << format_g(r.h_nm) << "," << format_g(r.r) << ": "
         << r.message << "\n";
      ++failed;
      continue;
    }
    os << format_g(r.h_nm) << "," << format_g(r.r) << ","
       << format_g(r.lambda_nm) << "," << format_g(r.g_estimate) << ","
       << format_g(r.barrier_occupancy) << "\n";
  }
  std::cout << "wrote " << rows.size() - failed << " rows to " << out;
  if (failed) std::cout << " (" << failed << " cells failed)";
  std::cout << "\n";
  return 0;
}

int run_extract(const std::string& spectrum_path, double init_c1, double init_c2,
                const std::vector<double>& centers_eV, double b_field,
                const std::string& out, uint64_t hash) {
  std::ostringstream rep;
  if (!spectrum_path.empty()) {
    std::ifstream is(spectrum_path);
    if (!is) throw std::runtime_error("cannot open spectrum: " + spectrum_path);
    std::string header;
    {
      std::ifstream probe(spectrum_path);
      std::getline(probe, header);
      while (!header.empty() && header[0] == '#') std::getline(probe, header);
    }
    const double to_uev = header.rfind("energy_eV,", 0) == 0 ? 1e6 : 1.0;
    const Spectrum s = load_spectrum_csv(is);
    const DoubleGaussianFit f =
        fit_double_gaussian(s, init_c1 * to_uev, init_c2 * to_uev);
    rep << "{\n"
        << "  \"c1_ueV\": " << format_g(f.c1) << ",\n"
        << "  \"c2_ueV\": " << format_g(f.c2) << ",\n"
        << "  \"sigma_ueV\": " << format_g(f.sigma) << ",\n"
        << "  \"amp1\": " << format_g(f.amp1) << ",\n"
        << "  \"amp2\": " << format_g(f.amp2) << ",\n"
        << "  \"unc_c1_ueV\": " << format_g(f.unc_c1) << ",\n"
        << "  \"unc_c2_ueV\": " << format_g(f.unc_c2) << ",\n"
        << "  \"unc_sigma_ueV\": " << format_g(f.unc_sigma) << ",\n"
        << "  \"residual_rms\": " << format_g(f.residual_rms) << ",\n"
        << "  \"iterations\": " << f.iterations << "\n"
        << "}\n";
  }
  if (centers_eV.size() == 4) {
    const GFactorEstimate g = g_from_centers(centers_eV[0], centers_eV[1],
                                             centers_eV[2], centers_eV[3], b_field);
    rep << "g_e_abs," << format_g(g.g_e_abs) << "\n"
        << "g_t_abs," << format_g(g.g_t_abs) << "\n"
        << "omega_e_ueV," << format_g(g.omega_e_ueV) << "\n"
        << "omega_t_ueV," << format_g(g.omega_t_ueV) << "\n";
  } else if (!centers_eV.empty()) {
    throw CLI::ValidationError("--centers", "need exactly four energies (eV)");
  }
  if (rep.str().empty())
    throw CLI::ValidationError("extract", "give --spectrum and/or --centers");
  if (!out.empty()) {
    std::ofstream os = open_out(out);
    write_csv_stamp(os, hash);
    os << rep.str();
  }
  std::cout << rep.str();
  return 0;
}

int run_fss(const std::string& series_path, double noise_floor,
            const std::string& out, uint64_t hash) {
  std::ifstream is(series_path);
  if (!is) throw std::runtime_error("cannot open series: " + series_path);
  std::string line;
  std::getline(is, line);
  while (!line.empty() && line[0] == '#') std::getline(is, line);
  if (line.rfind("beta_deg,", 0) != 0)
    throw std::runtime_error("series: header must be beta_deg,value");
  PolarizationSeries series;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    double bdeg, v;
    if (std::sscanf(line.c_str(), "%lf,%lf", &bdeg, &v) != 2)
      throw std::runtime_error("series: bad row: " + line);
    series.angle.push_back(bdeg * kDeg);
    series.value.push_back(v);
  }
  const FssFit f = fss_fit(series, noise_floor);
  std::ostringstream rep;
  rep << "fss_ueV," << format_g(f.fss) << "\n"
      << "fss_GHz," << format_g(f.fss / kPlanckH) << "\n"
      << "eta_deg," << (f.zero_fss ? "undefined" : format_g(f.eta / kDeg)) << "\n"
      << "zero_fss," << (f.zero_fss ? 1 : 0) << "\n";
  if (!out.empty()) {
    std::ofstream os = open_out(out);
    write_csv_stamp(os, hash);
    os << rep.str();
  }
  std::cout << rep.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"g-tensor, optical-dipole and nuclear-dragging toolkit for "
               "droplet-etched GaAs quantum dots"};
  app.set_config("--config", "", "flat key = value configuration with sections");
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  unsigned long seed = 1;
  app.add_option("--seed", seed, "seed for synthetic-noise workflows")
      ->capture_default_str();

  // transitions
  auto* tr = app.add_subcommand("transitions", "four-line transition table");
  FieldArgs tr_field;
  tr_field.attach(tr);
  HoleArgs tr_hole;
  tr_hole.attach(tr);
  double tr_ge = 0.08, tr_ge_z = -0.1, tr_ge_dperp = 0.0, tr_center = 0.0;
  std::string tr_out;
  tr->add_option("--ge", tr_ge, "electron in-plane g");
  tr->add_option("--ge-z", tr_ge_z, "electron out-of-plane g");
  tr->add_option("--ge-dperp", tr_ge_dperp, "electron in-plane anisotropy");
  tr->add_option("--omega-center-uev", tr_center, "central transition energy, ueV");
  tr->add_option("--out", tr_out, "also write the table as CSV");

  // polmap
  auto* pm = app.add_subcommand("polmap", "polar map of normalized rates");
  FieldArgs pm_field;
  pm_field.attach(pm);
  HoleArgs pm_hole;
  pm_hole.attach(pm);
  double pm_ge = 0.08, pm_ge_z = -0.1;
  int pm_nphi = 16, pm_nalpha = 180;
  std::string pm_out = "polmap.csv";
  pm->add_option("--ge", pm_ge, "electron in-plane g");
  pm->add_option("--ge-z", pm_ge_z, "electron out-of-plane g");
  pm->add_option("--n-phi", pm_nphi, "number of field azimuths");
  pm->add_option("--n-alpha", pm_nalpha, "number of polarizer angles");
  pm->add_option("--out", pm_out, "output CSV path");

  // dragscan
  auto* dr = app.add_subcommand("dragscan", "laser-sweep dragging simulation");
  NuclearBathParameters dr_bath;
  double dr_lw_ghz = 0.7;
  std::string dr_spin = "up", dr_dir = "both", dr_out = "dragscan.csv";
  SweepSpec dr_sweep;
  dr->add_option("--a-uev", dr_bath.a, "hyperfine constant per flip, ueV");
  dr->add_option("--gamma-n-uev", dr_bath.gamma_n_B, "nuclear Zeeman, ueV");
  dr->add_option("--relax-rate", dr_bath.relax_rate, "nuclear relaxation, 1/s");
  dr->add_option("--sideband-rate", dr_bath.sideband_rate, "peak side-band pumping, 1/s");
  dr->add_option("--linewidth-ghz", dr_lw_ghz, "optical linewidth FWHM, GHz");
  dr->add_option("--ground-spin", dr_spin, "electron manifold: up or down")
      ->check(CLI::IsMember({"up", "down"}));
  dr->add_option("--center-uev", dr_sweep.omega0, "unshifted resonance, ueV");
  dr->add_option("--half-range-uev", dr_sweep.half_range, "sweep half range, ueV");
  dr->add_option("--points", dr_sweep.n_points, "samples per direction");
  dr->add_option("--rate-uev-per-s", dr_sweep.rate, "sweep rate, ueV/s");
  dr->add_option("--direction", dr_dir, "up, down or both")
      ->check(CLI::IsMember({"up", "down", "both"}));
  dr->add_option("--out", dr_out, "output CSV path");

  // infer-signs
  auto* inf = app.add_subcommand("infer-signs", "g-factor signs from measurements");
  int inf_tdm = 1;
  std::string inf_labels = "DADA", inf_order = "e<t";
  inf->add_option("--tdm-parallel", inf_tdm,
                  "1 if s_{1,4} align with B, 0 if orthogonal");
  inf->add_option("--labels", inf_labels, "D/A labels of E1..E4, e.g. DADA");
  inf->add_option("--magnitude-order", inf_order, "e<t or e>t")
      ->check(CLI::IsMember({"e<t", "e>t"}));

  // sweep
  auto* sw = app.add_subcommand("sweep", "design sweep over filling height and Al fraction");
  std::string sw_profile = "default", sw_out = "sweep.csv";
  double sw_hmin = 3.0, sw_hmax = 9.0, sw_rmin = 0.25, sw_rmax = 0.25;
  int sw_hsteps = 7, sw_rsteps = 1, sw_grid = 48, sw_threads = 0;
  double sw_tol = 1e-7;
  sw->add_option("--profile", sw_profile, "AFM profile CSV or 'default'");
  sw->add_option("--h-min", sw_hmin, "minimum filling height, nm");
  sw->add_option("--h-max", sw_hmax, "maximum filling height, nm");
  sw->add_option("--h-steps", sw_hsteps, "filling-height samples");
  sw->add_option("--r-min", sw_rmin, "minimum Al fraction");
  sw->add_option("--r-max", sw_rmax, "maximum Al fraction");
  sw->add_option("--r-steps", sw_rsteps, "Al-fraction samples");
  sw->add_option("--grid-n", sw_grid, "grid points per axis");
  sw->add_option("--tol", sw_tol, "eigensolver residual tolerance");
  sw->add_option("--threads", sw_threads, "worker threads (0 = auto)");
  sw->add_option("--out", sw_out, "output CSV path");

  // extract
  auto* ex = app.add_subcommand("extract", "double-Gaussian line fit / g factors");
  std::string ex_spec, ex_out;
  double ex_c1 = 0.0, ex_c2 = 0.0, ex_b = 6.0;
  std::vector<double> ex_centers;
  ex->add_option("--spectrum", ex_spec, "spectrum CSV (energy_eV|energy_ueV,counts)");
  ex->add_option("--init-c1", ex_c1, "initial center 1, in the file's unit");
  ex->add_option("--init-c2", ex_c2, "initial center 2, in the file's unit");
  ex->add_option("--centers", ex_centers, "four line centers (eV) for g extraction");
  ex->add_option("--B", ex_b, "magnetic field for g extraction, tesla");
  ex->add_option("--out", ex_out, "also write the report to a file");

  // fss
  auto* fs = app.add_subcommand("fss", "fine-structure cosine fit");
  std::string fs_series, fs_out;
  double fs_floor = 1e-6;
  fs->add_option("--series", fs_series, "CSV beta_deg,value")->required();
  fs->add_option("--noise-floor", fs_floor, "amplitude floor, ueV");
  fs->add_option("--out", fs_out, "also write the report to a file");

  // stokes-areas
  auto* st = app.add_subcommand("stokes-areas", "rectilinear Stokes bound from areas");
  double st_a1 = 17.0, st_a2 = 3.0;
  st->add_option("--a1", st_a1, "area of the brighter line set");
  st->add_option("--a2", st_a2, "area of the dimmer line set");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  const uint64_t hash = fnv1a(app.config_to_str(true, false) +
                              "seed=" + std::to_string(seed));
  try {
    if (tr->parsed())
      return run_transitions(tr_field, tr_hole, tr_ge, tr_ge_z, tr_ge_dperp,
                             tr_center, tr_out, hash);
    if (pm->parsed())
      return run_polmap(pm_field, pm_hole, pm_ge, pm_ge_z, pm_nphi, pm_nalpha,
                        pm_out, hash);
    if (dr->parsed()) {
      NuclearBathParameters bath(dr_bath.a, dr_bath.gamma_n_B, dr_bath.relax_rate,
                                 dr_bath.sideband_rate, dr_lw_ghz * kPlanckH);
      return run_dragscan(bath, dr_spin, dr_sweep, dr_dir, dr_out, hash);
    }
    if (inf->parsed()) return run_infer_signs(inf_tdm, inf_labels, inf_order);
    if (sw->parsed())
      return run_sweep(sw_profile, sw_hmin, sw_hmax, sw_hsteps, sw_rmin, sw_rmax,
                       sw_rsteps, sw_grid, sw_tol, sw_threads, sw_out, hash);
    if (ex->parsed())
      return run_extract(ex_spec, ex_c1, ex_c2, ex_centers, ex_b, ex_out, hash);
    if (fs->parsed()) return run_fss(fs_series, fs_floor, fs_out, hash);
    if (st->parsed()) {
      std::cout << "s1_bright," << format_g(rectilinear_stokes_from_areas(st_a1, st_a2))
                << "\n"
                << "s1_orthogonal,"
                << format_g(-rectilinear_stokes_from_areas(st_a1, st_a2)) << "\n"
                << "contrast," << format_g(linear_polarization_contrast(st_a1, st_a2))
                << "\n";
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
