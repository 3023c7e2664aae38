#include "biym/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace biym {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    long long r = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument("");
    return r;
  } catch (...) {
    throw ConfigError("config: bad integer for '" + key + "': " + v);
  }
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double r = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("");
    return r;
  } catch (...) {
    throw ConfigError("config: bad number for '" + key + "': " + v);
  }
}

const std::set<std::string>& identity_names() {
  static const std::set<std::string> names = {
      "adjointness",          "curvature_expansion",
      "first_variation_pair", "first_variation_fd",
      "second_variation_fd",  "hess_consistency",
      "hess_symmetry",        "bracket_identity",
      "stress_trace",         "metric_variation_pair",
      "metric_variation_fd",  "conformal_equation"};
  return names;
}

}  // namespace

DensityF RunConfig::density() const {
  try {
    return DensityF::from_name(density_name, density_p);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

std::shared_ptr<const Lattice> RunConfig::make_lattice() const {
  try {
    return Lattice::make(n, extents, h);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ConformalMetric RunConfig::make_metric(
    std::shared_ptr<const Lattice> lat) const {
  if (metric_type == "uniform") {
    return ConformalMetric::uniform(std::move(lat), metric_scale);
  }
  if (metric_type == "conformal") {
    if (metric_file.empty()) {
      throw ConfigError("config: metric.type = conformal needs metric.file");
    }
    auto c = read_site_field(metric_file, lat->num_sites());
    return ConformalMetric::from_field(std::move(lat), std::move(c));
  }
  throw ConfigError("config: metric.type must be uniform or conformal");
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: line " + std::to_string(lineno) +
                        " has no '='");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (val.empty()) {
      throw ConfigError("config: empty value for '" + key + "'");
    }

    if (key == "lattice.n") {
      cfg.n = static_cast<int>(parse_int(key, val));
    } else if (key == "lattice.extents") {
      cfg.extents.clear();
      std::istringstream es(val);
      std::string tok;
      while (es >> tok) {
        cfg.extents.push_back(static_cast<int>(parse_int(key, tok)));
      }
      if (cfg.extents.empty()) {
        throw ConfigError("config: lattice.extents is empty");
      }
    } else if (key == "lattice.h") {
      cfg.h = parse_real(key, val);
    } else if (key == "fiber.m") {
      cfg.m = static_cast<int>(parse_int(key, val));
    } else if (key == "density.name") {
      cfg.density_name = val;
    } else if (key == "density.p") {
      cfg.density_p = parse_real(key, val);
    } else if (key == "metric.type") {
      cfg.metric_type = val;
    } else if (key == "metric.scale") {
      cfg.metric_scale = parse_real(key, val);
    } else if (key == "metric.file") {
      cfg.metric_file = val;
    } else if (key == "flow.max_iters") {
      cfg.flow.max_iters = parse_int(key, val);
    } else if (key == "flow.residual_tol") {
      cfg.flow.residual_tol = parse_real(key, val);
    } else if (key == "flow.initial_step") {
      cfg.flow.initial_step = parse_real(key, val);
    } else if (key == "flow.armijo_c") {
      cfg.flow.armijo_c = parse_real(key, val);
    } else if (key == "flow.backtrack") {
      cfg.flow.backtrack = parse_real(key, val);
    } else if (key == "flow.newton_tail") {
      if (val == "on" || val == "true") {
        cfg.flow.newton_tail = true;
      } else if (val == "off" || val == "false") {
        cfg.flow.newton_tail = false;
      } else {
        throw ConfigError("config: flow.newton_tail must be on or off");
      }
    } else if (key == "flow.seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_int(key, val));
    } else if (key == "flow.amplitude") {
      cfg.amplitude = parse_real(key, val);
    } else if (key == "conformal.density") {
      cfg.conformal_density = val;
    } else if (key == "conformal.p") {
      cfg.conformal_p = parse_real(key, val);
    } else if (key == "spectrum.k") {
      cfg.spectrum_k = static_cast<int>(parse_int(key, val));
    } else if (key == "spectrum.tau") {
      cfg.spectrum_tau = parse_real(key, val);
    } else if (key == "verify.trials") {
      cfg.verify_trials = static_cast<int>(parse_int(key, val));
    } else if (key == "verify.seed") {
      cfg.verify_seed = static_cast<std::uint64_t>(parse_int(key, val));
    } else if (key == "verify.conformal") {
      cfg.verify_conformal = val;
    } else if (key == "output.dir") {
      cfg.out_dir = val;
    } else if (key.rfind("verify.tol_", 0) == 0) {
      const std::string name = key.substr(std::string("verify.tol_").size());
      if (identity_names().count(name) == 0) {
        throw ConfigError("config: unknown identity in '" + key + "'");
      }
      cfg.verify_tols[name] = parse_real(key, val);
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }

  // validation against module preconditions
  if (cfg.n < 2 || cfg.n > Lattice::kMaxDim) {
    throw ConfigError("config: lattice.n must be in [2, 6]");
  }
  if (static_cast<int>(cfg.extents.size()) == 1) {
    cfg.extents.assign(cfg.n, cfg.extents[0]);
  }
  if (static_cast<int>(cfg.extents.size()) != cfg.n) {
    throw ConfigError("config: lattice.extents must list 1 or n values");
  }
  for (int L : cfg.extents) {
    if (L < 3) throw ConfigError("config: extents must be >= 3");
  }
  if (!(cfg.h > 0.0)) throw ConfigError("config: lattice.h must be > 0");
  if (cfg.m < 1 || cfg.m > AlgebraElement::kMaxDim) {
    throw ConfigError("config: fiber.m must be in [1, 4]");
  }
  if (cfg.density_name != "bi" && cfg.density_name != "ym" &&
      cfg.density_name != "fp") {
    throw ConfigError("config: density.name must be bi, ym or fp");
  }
  if (cfg.density_name == "fp" && !(cfg.density_p > 2.0)) {
    throw ConfigError("config: density.p must be > 2 for fp");
  }
  if (!(cfg.metric_scale > 0.0)) {
    throw ConfigError("config: metric.scale must be > 0");
  }
  try {
    cfg.flow.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (cfg.amplitude < 0.0) {
    throw ConfigError("config: flow.amplitude must be >= 0");
  }
  if (cfg.conformal_density != "ym" && cfg.conformal_density != "fp") {
    throw ConfigError("config: conformal.density must be ym or fp");
  }
  if (cfg.spectrum_k < 1) {
    throw ConfigError("config: spectrum.k must be >= 1");
  }
  if (cfg.spectrum_tau < 0.0) {
    throw ConfigError("config: spectrum.tau must be >= 0");
  }
  if (cfg.verify_trials < 1) {
    throw ConfigError("config: verify.trials must be >= 1");
  }
  if (cfg.verify_conformal != "auto" && cfg.verify_conformal != "on" &&
      cfg.verify_conformal != "off") {
    throw ConfigError("config: verify.conformal must be auto, on or off");
  }
  for (const auto& [name, tol] : cfg.verify_tols) {
    if (!(tol > 0.0)) {
      throw ConfigError("config: verify.tol_" + name + " must be > 0");
    }
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::vector<double> read_site_field(const std::string& path,
                                    std::int64_t nsites) {
  std::ifstream in(path);
  if (!in) throw ConfigError("field file: cannot open " + path);
  std::vector<double> field(nsites, 0.0);
  std::vector<bool> seen(nsites, false);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ConfigError("field file: line " + std::to_string(lineno) +
                        " is not 'site,value'");
    }
    const std::string a = trim(line.substr(0, comma));
    const std::string b = trim(line.substr(comma + 1));
    if (lineno == 1 && !a.empty() &&
        !std::isdigit(static_cast<unsigned char>(a[0]))) {
      continue;  // header row
    }
    const long long site = parse_int("site", a);
    if (site < 0 || site >= nsites) {
      throw ConfigError("field file: site index out of range at line " +
                        std::to_string(lineno));
    }
    field[site] = parse_real("value", b);
    seen[site] = true;
  }
  if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) {
    throw ConfigError("field file: missing sites in " + path);
  }
  return field;
}

}  // namespace biym
