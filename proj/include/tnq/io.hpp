#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tnq/analysis.hpp"
#include "tnq/hamiltonian.hpp"
#include "tnq/series.hpp"
#include "tnq/thermal.hpp"

namespace tnq {

// One flat configuration record shared by all subcommands.  Values are
// validated against the preconditions of whichever pipeline consumes them,
// and the canonical serialization is hashed into every output file.
struct RunConfig {
  Params params;
  std::string state = "Y+";  // alias, or "custom" when angles are set
  double theta = 0.0;
  double phi = 0.0;
  bool has_angles = false;
  std::string method = "fold";
  long D = 60;     // space-direction bond cap
  long D_t = 60;   // time-direction bond cap
  double delta = 0.1;
  int order = 2;
  double t_max = 10.0;
  double sample_every = 0.1;
  int N = 3;  // window width in sites
  std::uint64_t seed = 0;
  std::string outdir = ".";
  bool allow_integrable = false;
  // Thermal-curve settings.
  double beta_min = -2.0;
  double beta_max = 2.0;
  double delta_beta = 0.01;
  long D_beta = 20;
  bool has_target_energy = false;
  double target_energy = 0.0;
  // Level-statistics settings.
  int L = 14;
  bool has_window = false;
  double window_center = 0.0;
  double window_width = 0.0;
};

ProductState config_state(const RunConfig& c);

// Field-level validation; an empty result means the config is usable.
std::vector<std::string> validate_quench(const RunConfig& c);
std::vector<std::string> validate_thermal_curve(const RunConfig& c);
std::vector<std::string> validate_level_stats(const RunConfig& c);

// Applies one key=value assignment; returns false with a message on an
// unknown key or a malformed value.
bool apply_key_value(RunConfig& c, const std::string& key,
                     const std::string& value, std::string& err);

// Reads a key=value file ('#' starts a comment).  Returns false and sets
// err on the first problem.
bool load_config_file(const std::string& path, RunConfig& c,
                      std::string& err);

// Canonical key=value serialization, keys sorted, 17 significant digits.
std::string canonical_config(const RunConfig& c);

std::uint64_t fnv1a(const std::string& text);

// 16 hex digits of the FNV-1a hash of the canonical serialization.
std::string config_hash(const RunConfig& c);

// Shortest round-trip-exact decimal form.
std::string format_double(double v);

// Writes through a temp file in the same directory plus rename.
void atomic_write(const std::string& path, const std::string& content);

// CSV emitters; every file starts with a '# config_hash=' line.  Series
// rows begin at the first evolved sample.
void write_series_csv(const std::string& path, const RunSeries& series,
                      const std::string& hash);
void write_distances_csv(const std::string& path, const DistanceSeries& d,
                         const std::string& hash);
void write_thermal_curve_csv(const std::string& path, const ThermalCurve& c,
                             const std::string& hash);
void write_rdm_json(const std::string& path, double t,
                    const Eigen::MatrixXcd& rho, const std::string& hash);

const char* regime_name(Regime r);

}  // namespace tnq
