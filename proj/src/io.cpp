#include "tnq/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace tnq {

ProductState config_state(const RunConfig& c) {
  if (c.has_angles) return ProductState{c.theta, c.phi};
  return named_state(c.state);
}

namespace {

bool known_state(const RunConfig& c) {
  if (c.has_angles)
    return std::isfinite(c.theta) && std::isfinite(c.phi) && c.theta >= 0 &&
           c.theta <= M_PI;
  return c.state == "X+" || c.state == "Y+" || c.state == "Z+";
}

void check_common(const RunConfig& c, std::vector<std::string>& out) {
  if (!std::isfinite(c.params.g) || !std::isfinite(c.params.h))
    out.push_back("params: g and h must be finite");
  if (c.outdir.empty()) out.push_back("outdir: must not be empty");
}

}  // namespace

std::vector<std::string> validate_quench(const RunConfig& c) {
  std::vector<std::string> out;
  check_common(c, out);
  if (!known_state(c))
    out.push_back(
        "state: need X+, Y+, Z+ or explicit angles with theta in [0,pi]");
  if (c.method != "fold" && c.method != "itebd" && c.method != "exact")
    out.push_back("method: must be fold, itebd or exact");
  if (c.method == "itebd" && c.D < 1) out.push_back("D: must be at least 1");
  if (c.method == "fold" && c.D_t < 1)
    out.push_back("D_t: must be at least 1");
  if (c.method == "exact" && (c.L < 2 || c.L > 14 || c.L % 2 != 0))
    out.push_back("L: exact runs need even L between 2 and 14");
  if (!(c.delta > 0)) out.push_back("delta: must be positive");
  if (c.order != 2 && c.order != 4) out.push_back("order: must be 2 or 4");
  if (!(c.t_max >= 0)) out.push_back("t_max: must be non-negative");
  if (!(c.sample_every > 0))
    out.push_back("sample_every: must be positive");
  else if (c.delta > 0) {
    const double ratio = c.sample_every / c.delta;
    if (std::abs(ratio - std::round(ratio)) > 1e-9)
      out.push_back("sample_every: must be an integer multiple of delta");
  }
  if (c.N < 2 || c.N > 6) out.push_back("N: window must span 2 to 6 sites");
  if (integrable(c.params) && !c.allow_integrable)
    out.push_back(
        "params: integrable point (g or h is zero); pass --allow-integrable "
        "to run anyway");
  return out;
}

std::vector<std::string> validate_thermal_curve(const RunConfig& c) {
  std::vector<std::string> out;
  check_common(c, out);
  if (!(c.delta_beta > 0)) out.push_back("delta_beta: must be positive");
  if (c.beta_min > 0 || c.beta_max < 0 || c.beta_min >= c.beta_max)
    out.push_back("beta range: need beta_min <= 0 <= beta_max");
  if (c.D_beta < 1) out.push_back("D_beta: must be at least 1");
  if (c.has_target_energy && !std::isfinite(c.target_energy))
    out.push_back("target_energy: must be finite");
  return out;
}

std::vector<std::string> validate_level_stats(const RunConfig& c) {
  std::vector<std::string> out;
  check_common(c, out);
  if (c.L < 8 || c.L > 16 || c.L % 2 != 0)
    out.push_back("L: need even L between 8 and 16");
  if (c.has_window && !(c.window_width > 0))
    out.push_back("window: width must be positive");
  return out;
}

namespace {

bool parse_double(const std::string& v, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(v, &pos);
    return pos == v.size() && std::isfinite(out);
  } catch (...) {
    return false;
  }
}

bool parse_long(const std::string& v, long& out) {
  try {
    std::size_t pos = 0;
    out = std::stol(v, &pos);
    return pos == v.size();
  } catch (...) {
    return false;
  }
}

bool parse_bool(const std::string& v, bool& out) {
  if (v == "true" || v == "1") {
    out = true;
    return true;
  }
  if (v == "false" || v == "0") {
    out = false;
    return true;
  }
  return false;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

bool apply_key_value(RunConfig& c, const std::string& key,
                     const std::string& value, std::string& err) {
  auto bad = [&](const char* what) {
    err = key + ": expected " + what + ", got '" + value + "'";
    return false;
  };
  double d;
  long l;
  bool b;
  if (key == "g") {
    if (!parse_double(value, d)) return bad("a number");
    c.params.g = d;
  } else if (key == "h") {
    if (!parse_double(value, d)) return bad("a number");
    c.params.h = d;
  } else if (key == "state") {
    c.state = value;
    c.has_angles = false;
  } else if (key == "theta") {
    if (!parse_double(value, d)) return bad("a number");
    c.theta = d;
    c.has_angles = true;
  } else if (key == "phi") {
    if (!parse_double(value, d)) return bad("a number");
    c.phi = d;
    c.has_angles = true;
  } else if (key == "method") {
    c.method = value;
  } else if (key == "D") {
    if (!parse_long(value, l)) return bad("an integer");
    c.D = l;
  } else if (key == "D_t") {
    if (!parse_long(value, l)) return bad("an integer");
    c.D_t = l;
  } else if (key == "delta") {
    if (!parse_double(value, d)) return bad("a number");
    c.delta = d;
  } else if (key == "order") {
    if (!parse_long(value, l)) return bad("an integer");
    c.order = int(l);
  } else if (key == "t_max") {
    if (!parse_double(value, d)) return bad("a number");
    c.t_max = d;
  } else if (key == "sample_every") {
    if (!parse_double(value, d)) return bad("a number");
    c.sample_every = d;
  } else if (key == "N") {
    if (!parse_long(value, l)) return bad("an integer");
    c.N = int(l);
  } else if (key == "seed") {
    if (!parse_long(value, l) || l < 0) return bad("a non-negative integer");
    c.seed = std::uint64_t(l);
  } else if (key == "outdir") {
    c.outdir = value;
  } else if (key == "allow_integrable") {
    if (!parse_bool(value, b)) return bad("true or false");
    c.allow_integrable = b;
  } else if (key == "beta_min") {
    if (!parse_double(value, d)) return bad("a number");
    c.beta_min = d;
  } else if (key == "beta_max") {
    if (!parse_double(value, d)) return bad("a number");
    c.beta_max = d;
  } else if (key == "delta_beta") {
    if (!parse_double(value, d)) return bad("a number");
    c.delta_beta = d;
  } else if (key == "D_beta") {
    if (!parse_long(value, l)) return bad("an integer");
    c.D_beta = l;
  } else if (key == "target_energy") {
    if (!parse_double(value, d)) return bad("a number");
    c.target_energy = d;
    c.has_target_energy = true;
  } else if (key == "L") {
    if (!parse_long(value, l)) return bad("an integer");
    c.L = int(l);
  } else if (key == "window_center") {
    if (!parse_double(value, d)) return bad("a number");
    c.window_center = d;
    c.has_window = true;
  } else if (key == "window_width") {
    if (!parse_double(value, d)) return bad("a number");
    c.window_width = d;
    c.has_window = true;
  } else {
    err = "unknown key '" + key + "'";
    return false;
  }
  return true;
}

bool load_config_file(const std::string& path, RunConfig& c,
                      std::string& err) {
  std::ifstream in(path);
  if (!in) {
    err = "cannot open config file '" + path + "'";
    return false;
  }
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      err = path + ":" + std::to_string(lineno) + ": expected key=value";
      return false;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    std::string msg;
    if (!apply_key_value(c, key, value, msg)) {
      err = path + ":" + std::to_string(lineno) + ": " + msg;
      return false;
    }
  }
  return true;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string canonical_config(const RunConfig& c) {
  std::ostringstream out;
  out << "D=" << c.D << "\n";
  out << "D_beta=" << c.D_beta << "\n";
  out << "D_t=" << c.D_t << "\n";
  out << "L=" << c.L << "\n";
  out << "N=" << c.N << "\n";
  out << "allow_integrable=" << (c.allow_integrable ? "true" : "false")
      << "\n";
  out << "beta_max=" << format_double(c.beta_max) << "\n";
  out << "beta_min=" << format_double(c.beta_min) << "\n";
  out << "delta=" << format_double(c.delta) << "\n";
  out << "delta_beta=" << format_double(c.delta_beta) << "\n";
  out << "g=" << format_double(c.params.g) << "\n";
  out << "h=" << format_double(c.params.h) << "\n";
  out << "method=" << c.method << "\n";
  out << "order=" << c.order << "\n";
  out << "sample_every=" << format_double(c.sample_every) << "\n";
  out << "seed=" << c.seed << "\n";
  if (c.has_angles) {
    out << "phi=" << format_double(c.phi) << "\n";
    out << "state=custom\n";
    out << "theta=" << format_double(c.theta) << "\n";
  } else {
    out << "state=" << c.state << "\n";
  }
  out << "t_max=" << format_double(c.t_max) << "\n";
  if (c.has_target_energy)
    out << "target_energy=" << format_double(c.target_energy) << "\n";
  if (c.has_window) {
    out << "window_center=" << format_double(c.window_center) << "\n";
    out << "window_width=" << format_double(c.window_width) << "\n";
  }
  return out.str();
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash(const RunConfig& c) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                (unsigned long long)fnv1a(canonical_config(c)));
  return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out.good()) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

void write_series_csv(const std::string& path, const RunSeries& series,
                      const std::string& hash) {
  std::ostringstream out;
  out << "# config_hash=" << hash << "\n";
  out << "t,sx,sy,sz,energy,entropy,renyi2,bond_dim,truncation_error\n";
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    if (series.times[i] == 0.0) continue;
    auto field = [&](const std::vector<double>& v) {
      return i < v.size() ? format_double(v[i]) : std::string("nan");
    };
    out << format_double(series.times[i]) << ',' << field(series.sx) << ','
        << field(series.sy) << ',' << field(series.sz) << ','
        << field(series.energy) << ',' << field(series.entropy) << ','
        << field(series.renyi2) << ','
        << (i < series.bond_dim.size()
                ? std::to_string(series.bond_dim[i])
                : std::string("0"))
        << ',' << field(series.truncation_error) << "\n";
  }
  atomic_write(path, out.str());
}

void write_distances_csv(const std::string& path, const DistanceSeries& d,
                         const std::string& hash) {
  std::ostringstream out;
  out << "# config_hash=" << hash << "\n";
  out << "t,d_inst,d_avg,err_inst,err_avg\n";
  for (std::size_t i = 0; i < d.times.size(); ++i) {
    if (d.times[i] == 0.0) continue;
    out << format_double(d.times[i]) << ',' << format_double(d.d_inst[i])
        << ',' << format_double(d.d_avg[i]) << ','
        << format_double(d.err_inst[i]) << ',' << format_double(d.err_avg[i])
        << "\n";
  }
  atomic_write(path, out.str());
}

void write_thermal_curve_csv(const std::string& path, const ThermalCurve& c,
                             const std::string& hash) {
  std::ostringstream out;
  out << "# config_hash=" << hash << "\n";
  out << "beta,energy\n";
  for (std::size_t i = 0; i < c.betas.size(); ++i)
    out << format_double(c.betas[i]) << ',' << format_double(c.energies[i])
        << "\n";
  atomic_write(path, out.str());
}

void write_rdm_json(const std::string& path, double t,
                    const Eigen::MatrixXcd& rho, const std::string& hash) {
  nlohmann::json j;
  j["config_hash"] = hash;
  j["t"] = t;
  j["dim"] = rho.rows();
  nlohmann::json rows = nlohmann::json::array();
  for (long r = 0; r < rho.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (long c = 0; c < rho.cols(); ++c)
      row.push_back({rho(r, c).real(), rho(r, c).imag()});
    rows.push_back(std::move(row));
  }
  j["rho"] = std::move(rows);
  atomic_write(path, j.dump(2) + "\n");
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::strong:
      return "strong";
    case Regime::weak:
      return "weak";
    default:
      return "none";
  }
}

}  // namespace tnq
