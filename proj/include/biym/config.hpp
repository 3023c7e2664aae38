#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "biym/density.hpp"
#include "biym/errors.hpp"
#include "biym/flow.hpp"
#include "biym/lattice.hpp"

namespace biym {

// Structured-text key-value run configuration. Unknown keys are rejected;
// numeric fields are validated against module preconditions.
struct RunConfig {
  // lattice
  int n = 2;
  std::vector<int> extents = {8, 8};
  double h = 1.0;
  // fiber
  int m = 2;
  // density
  std::string density_name = "bi";
  double density_p = 3.0;
  // metric
  std::string metric_type = "uniform";  // uniform | conformal
  double metric_scale = 1.0;
  std::string metric_file;
  // flow
  FlowConfig flow;
  std::uint64_t seed = 1;
  double amplitude = 0.3;
  // conformal pipeline
  std::string conformal_density = "ym";  // ym | fp
  double conformal_p = 3.0;
  // spectrum
  int spectrum_k = 12;
  double spectrum_tau = 0.0;  // 0 = auto
  // verify
  int verify_trials = 20;
  std::uint64_t verify_seed = 2026;
  std::string verify_conformal = "auto";  // auto | on | off
  std::map<std::string, double> verify_tols;

  std::string out_dir = ".";

  DensityF density() const;
  std::shared_ptr<const Lattice> make_lattice() const;
  ConformalMetric make_metric(std::shared_ptr<const Lattice> lat) const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// "site,value" CSV with one row per site (header row optional).
std::vector<double> read_site_field(const std::string& path,
                                    std::int64_t nsites);

}  // namespace biym
