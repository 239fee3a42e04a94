#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tnq/analysis.hpp"
#include "tnq/exact.hpp"
#include "tnq/folding.hpp"
#include "tnq/io.hpp"
#include "tnq/itebd.hpp"
#include "tnq/spectral.hpp"
#include "tnq/thermal.hpp"

extern "C" void openblas_set_num_threads(int);

namespace {

using nlohmann::json;
using namespace tnq;

constexpr int kExitError = 1;
constexpr int kExitFlagged = 2;
constexpr int kExitUsage = 64;

int report_validation(const std::vector<std::string>& problems) {
  for (const std::string& p : problems)
    std::cerr << "config error: " << p << "\n";
  return kExitUsage;
}

std::string join_path(const std::string& dir, const std::string& name) {
  if (dir.empty() || dir.back() == '/') return dir + name;
  return dir + "/" + name;
}

json config_json(const RunConfig& c) {
  json j;
  j["g"] = c.params.g;
  j["h"] = c.params.h;
  if (c.has_angles) {
    j["state"] = "custom";
    j["theta"] = c.theta;
    j["phi"] = c.phi;
  } else {
    j["state"] = c.state;
  }
  j["method"] = c.method;
  j["D"] = c.D;
  j["D_t"] = c.D_t;
  j["delta"] = c.delta;
  j["order"] = c.order;
  j["t_max"] = c.t_max;
  j["sample_every"] = c.sample_every;
  j["N"] = c.N;
  j["seed"] = c.seed;
  j["L"] = c.L;
  return j;
}

RunSeries dispatch_quench(const RunConfig& c, long space_cap, long time_cap) {
  const ProductState s0 = config_state(c);
  if (c.method == "exact")
    return run_quench_exact(c.L, s0, c.params, c.t_max, c.sample_every, c.N);
  if (c.method == "itebd") {
    QuenchSettings qs;
    qs.t_max = c.t_max;
    qs.sample_every = c.sample_every;
    qs.delta = c.delta;
    qs.order = c.order;
    qs.chi_max = space_cap;
    qs.rdm_sites = c.N;
    return run_quench_itebd(s0, c.params, qs);
  }
  FoldSettings fs;
  fs.t_max = c.t_max;
  fs.sample_every = c.sample_every;
  fs.delta = c.delta;
  fs.order = c.order;
  fs.chi_t = time_cap;
  fs.rdm_sites = c.N;
  fs.seed = c.seed;
  return run_quench_fold(s0, c.params, fs);
}

int cmd_quench(const RunConfig& c) {
  const std::vector<std::string> problems = validate_quench(c);
  if (!problems.empty()) return report_validation(problems);
  const std::string hash = config_hash(c);

  const RunSeries primary = dispatch_quench(c, c.D, c.D_t);
  RunSeries secondary;
  if (c.method != "exact" && c.t_max > 0) {
    const long half_d = std::max(1L, c.D / 2);
    const long half_dt = std::max(1L, c.D_t / 2);
    secondary = dispatch_quench(c, half_d, half_dt);
  }

  write_series_csv(join_path(c.outdir, "series.csv"), primary, hash);
  for (std::size_t i = 0; i < primary.times.size(); ++i)
    write_rdm_json(
        join_path(c.outdir, "rdm_t" + std::to_string(i) + ".json"),
        primary.times[i], primary.rdms[i], hash);

  json summary;
  summary["config_hash"] = hash;
  summary["config"] = config_json(c);
  summary["unreliable"] = primary.unreliable;
  if (!primary.note.empty()) summary["note"] = primary.note;
  const double e0 = primary.energy.empty() ? 0.0 : primary.energy.front();
  summary["initial_energy"] = e0;
  summary["energy_drift_max"] =
      primary.energy.empty() ? 0.0 : energy_drift(primary);

  bool have_beta = false;
  double beta = 0.0;
  try {
    const ThermalCurve curve = compute_thermal_curve(
        c.params, c.beta_min, c.beta_max, c.delta_beta, c.D_beta);
    beta = beta_for_energy(curve, e0);
    have_beta = true;
    summary["beta"] = beta;
  } catch (const std::exception& e) {
    summary["beta_error"] = e.what();
  }

  bool flagged = primary.unreliable;
  if (have_beta && primary.times.size() > 1) {
    const Eigen::MatrixXcd rho_th =
        thermal_rdm(c.params, beta, c.N, c.delta_beta, c.D_beta);
    const DistanceSeries dist = distance_series(primary, secondary, rho_th);
    write_distances_csv(join_path(c.outdir, "distances.csv"), dist, hash);
    try {
      const RegimeCall call = classify_regime(dist);
      summary["regime"] = regime_name(call.regime);
      summary["final_quarter_max"] = call.final_quarter_max;
      summary["low_confidence"] = call.low_confidence;
      if (!call.note.empty()) summary["regime_note"] = call.note;
      if (call.avg_fit.n > 0) {
        summary["fit"] = {{"a", call.avg_fit.a},
                          {"b", call.avg_fit.b},
                          {"rms", call.avg_fit.rms},
                          {"n", call.avg_fit.n}};
      }
    } catch (const std::exception& e) {
      summary["regime_error"] = e.what();
    }
  } else if (!have_beta) {
    flagged = true;
  }

  atomic_write(join_path(c.outdir, "summary.json"), summary.dump(2) + "\n");
  return flagged ? kExitFlagged : 0;
}

int cmd_thermal_curve(const RunConfig& c) {
  const std::vector<std::string> problems = validate_thermal_curve(c);
  if (!problems.empty()) return report_validation(problems);
  const std::string hash = config_hash(c);

  const ThermalCurve curve = compute_thermal_curve(
      c.params, c.beta_min, c.beta_max, c.delta_beta, c.D_beta);
  write_thermal_curve_csv(join_path(c.outdir, "thermal_curve.csv"), curve,
                          hash);

  json summary;
  summary["config_hash"] = hash;
  summary["beta_min"] = c.beta_min;
  summary["beta_max"] = c.beta_max;
  summary["points"] = curve.betas.size();

  bool monotone = true;
  for (std::size_t i = 0; i + 1 < curve.energies.size(); ++i)
    if (curve.energies[i + 1] > curve.energies[i] + 1e-9) monotone = false;
  summary["monotone"] = monotone;

  int code = 0;
  if (!monotone) {
    std::cerr << "warning: thermal curve is not monotonically decreasing\n";
    code = kExitFlagged;
  }
  if (c.has_target_energy) {
    try {
      summary["target_energy"] = c.target_energy;
      summary["beta"] = beta_for_energy(curve, c.target_energy);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      summary["beta_error"] = e.what();
      code = std::max(code, kExitError);
    }
  }
  atomic_write(join_path(c.outdir, "summary.json"), summary.dump(2) + "\n");
  return code;
}

int cmd_level_stats(const RunConfig& c) {
  const std::vector<std::string> problems = validate_level_stats(c);
  if (!problems.empty()) return report_validation(problems);
  const std::string hash = config_hash(c);

  const std::vector<SectorSpectrum> sectors =
      resolved_sector_spectra(c.params, c.L);
  const SpacingStats stats = pooled_spacing_stats(
      sectors, c.L, c.has_window ? c.window_center : 0.0,
      c.has_window ? c.window_width : 0.0);

  std::ostringstream out;
  out << "# config_hash=" << hash << "\n";
  out << "s_lo,s_hi,density,wigner_density,poisson_density\n";
  const int bins = int(stats.hist_density.size());
  for (int b = 0; b < bins; ++b) {
    const double s0 = 4.0 * b / bins, s1 = 4.0 * (b + 1) / bins;
    out << format_double(s0) << ',' << format_double(s1) << ','
        << format_double(stats.hist_density[b]) << ','
        << format_double((wigner_cdf(s1) - wigner_cdf(s0)) / (s1 - s0)) << ','
        << format_double((poisson_cdf(s1) - poisson_cdf(s0)) / (s1 - s0))
        << "\n";
  }
  atomic_write(join_path(c.outdir, "spacing_hist.csv"), out.str());

  json summary;
  summary["config_hash"] = hash;
  summary["L"] = c.L;
  summary["n_spacings"] = stats.spacings.size();
  summary["r_mean"] = stats.r_mean;
  summary["l1_wigner"] = stats.l1_wigner;
  summary["l1_poisson"] = stats.l1_poisson;
  summary["verdict"] =
      stats.l1_wigner < stats.l1_poisson ? "wigner" : "poisson";
  if (c.has_window) {
    summary["window_center"] = c.window_center;
    summary["window_width"] = c.window_width;
  }
  atomic_write(join_path(c.outdir, "summary.json"), summary.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  int threads = 1;
  if (const char* env = std::getenv("TNQ_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) threads = v;
  }
  openblas_set_num_threads(threads);

  RunConfig cfg;
  // The config file seeds the defaults, so any explicit flag wins.
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      std::string err;
      if (!load_config_file(argv[i + 1], cfg, err)) {
        std::cerr << "config error: " << err << "\n";
        return kExitUsage;
      }
    }
  }

  CLI::App app{"Quench dynamics of the infinite tilted-field chain"};
  app.require_subcommand(1);
  // The longitudinal coupling takes --h, so help must not claim -h.
  app.set_help_flag("--help", "print usage");
  std::string config_path;  // consumed above, registered so parsing accepts it

  std::vector<double> window;
  auto add_shared = [&](CLI::App* sub) {
    sub->set_help_flag("--help", "print usage");
    sub->add_option("--config", config_path, "key=value settings file");
    sub->add_option("--g", cfg.params.g, "transverse coupling");
    sub->add_option("--h", cfg.params.h, "longitudinal coupling");
    sub->add_option("--outdir", cfg.outdir, "output directory");
    sub->add_option("--seed", cfg.seed, "seed for any stochastic fallback");
  };

  CLI::App* quench = app.add_subcommand("quench", "evolve one product state");
  add_shared(quench);
  quench->add_option("--state", cfg.state, "X+, Y+ or Z+");
  quench->add_option("--theta", cfg.theta, "polar angle of a custom state")
      ->each([&](const std::string&) { cfg.has_angles = true; });
  quench->add_option("--phi", cfg.phi, "azimuth of a custom state")
      ->each([&](const std::string&) { cfg.has_angles = true; });
  quench->add_option("--method", cfg.method, "fold, itebd or exact");
  quench->add_option("--D", cfg.D, "spatial bond cap (itebd)");
  quench->add_option("--D-t", cfg.D_t, "temporal bond cap (fold)");
  quench->add_option("--delta", cfg.delta, "Trotter step");
  quench->add_option("--order", cfg.order, "Trotter order, 2 or 4");
  quench->add_option("--t-max", cfg.t_max, "evolution horizon");
  quench->add_option("--sample-every", cfg.sample_every, "sampling interval");
  quench->add_option("--N", cfg.N, "window width in sites");
  quench->add_option("--L", cfg.L, "chain length for method=exact");
  quench->add_flag("--allow-integrable", cfg.allow_integrable,
                   "permit g=0 or h=0");

  CLI::App* thermal =
      app.add_subcommand("thermal-curve", "energy against inverse temperature");
  add_shared(thermal);
  thermal->add_option("--beta-min", cfg.beta_min, "lowest inverse temperature");
  thermal->add_option("--beta-max", cfg.beta_max, "highest inverse temperature");
  thermal->add_option("--delta-beta", cfg.delta_beta, "grid step");
  thermal->add_option("--D-beta", cfg.D_beta, "purification bond cap");
  thermal
      ->add_option("--target-energy", cfg.target_energy,
                   "solve for the matching inverse temperature")
      ->each([&](const std::string&) { cfg.has_target_energy = true; });

  CLI::App* level =
      app.add_subcommand("level-stats", "sector spectra spacing statistics");
  add_shared(level);
  level->add_option("--L", cfg.L, "chain length");
  level->add_option("--window", window, "energy-per-site center and width")
      ->expected(2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help requests exit clean; everything else is a usage problem.
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  if (window.size() == 2) {
    cfg.window_center = window[0];
    cfg.window_width = window[1];
    cfg.has_window = true;
  }

  try {
    if (quench->parsed()) return cmd_quench(cfg);
    if (thermal->parsed()) return cmd_thermal_curve(cfg);
    if (level->parsed()) return cmd_level_stats(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}
