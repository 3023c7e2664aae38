// biym: a desk-scale lattice laboratory for Born-Infeld-Yang-Mills
// functionals. Subcommands: verify, flow, conformal, spectrum, stress,
// export.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include "biym/conformal.hpp"
#include "biym/config.hpp"
#include "biym/flow.hpp"
#include "biym/functional.hpp"
#include "biym/snapshot.hpp"
#include "biym/threading.hpp"
#include "biym/verify.hpp"

namespace {

using namespace biym;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNoConvergence = 3;

struct Options {
  std::string config_path;
  std::string snapshot_path;
  std::string out_dir;
  std::int64_t seed = -1;  // -1 = keep config value
  bool quiet = false;
};

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

RunConfig load_config(const Options& opt) {
  if (opt.config_path.empty()) {
    throw ConfigError("missing --config");
  }
  RunConfig cfg = parse_config_file(opt.config_path);
  if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
  if (opt.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opt.seed);
  return cfg;
}

std::string trace_csv(const std::vector<TraceRow>& trace) {
  std::ostringstream out;
  out << "iter,energy,residual,step\n";
  for (const auto& row : trace) {
    out << row.iter << ',' << fmt(row.energy) << ',' << fmt(row.residual)
        << ',' << fmt(row.step) << '\n';
  }
  return out.str();
}

int cmd_verify(const Options& opt) {
  const RunConfig cfg = load_config(opt);
  const auto results = run_verify(cfg);
  const std::string table = format_verify_table(results);
  if (!opt.quiet) std::cout << table;
  atomic_write_text(join(cfg.out_dir, "verify_report.csv"),
                    format_verify_csv(results));
  std::ostringstream txt;
  bool all_pass = true;
  for (const auto& r : results) {
    all_pass = all_pass && r.pass;
    txt << r.name << ": " << (r.pass ? "pass" : "fail")
        << " max_residual=" << fmt(r.max_residual)
        << " tolerance=" << fmt(r.tolerance) << "\n";
  }
  txt << "overall: " << (all_pass ? "pass" : "fail") << "\n";
  atomic_write_text(join(cfg.out_dir, "verify_report.txt"), txt.str());
  return all_pass ? kExitOk : kExitVerifyFail;
}

int cmd_flow(const Options& opt) {
  const RunConfig cfg = load_config(opt);
  const auto lat = cfg.make_lattice();
  const ConformalMetric g = cfg.make_metric(lat);
  const DensityF F = cfg.density();
  const Connection D0 = random_connection(lat, cfg.m, cfg.seed, cfg.amplitude);
  const FlowResult res = minimize(D0, g, F, cfg.flow);

  atomic_write_text(join(cfg.out_dir, "flow_trace.csv"),
                    trace_csv(res.trace));
  save_snapshot(join(cfg.out_dir, "connection.biym"), res.connection,
                F.name());
  if (!opt.quiet) {
    std::cout << "status:   " << to_string(res.status) << "\n"
              << "iters:    " << res.trace.back().iter << "\n"
              << "energy:   " << fmt(res.final_energy) << "\n"
              << "residual: " << fmt(res.final_residual) << "\n";
  }
  return res.status == FlowStatus::Converged ? kExitOk : kExitNoConvergence;
}

int cmd_conformal(const Options& opt) {
  const RunConfig cfg = load_config(opt);
  if (cfg.n < 5) {
    throw ConfigError("the conformal pipeline requires lattice.n >= 5");
  }
  const auto lat = cfg.make_lattice();
  const ConformalMetric g = cfg.make_metric(lat);
  const DensityF F = cfg.conformal_density == "ym"
                         ? DensityF::yang_mills()
                         : DensityF::power(cfg.conformal_p);

  const Connection D0 = random_connection(lat, cfg.m, cfg.seed, cfg.amplitude);
  const FlowResult res = minimize(D0, g, F, cfg.flow);

  std::ostringstream txt;
  txt << "flow_status: " << to_string(res.status) << "\n"
      << "flow_energy: " << fmt(res.final_energy) << "\n"
      << "flow_residual: " << fmt(res.final_residual) << "\n";

  const SigmaField sf = sigma_field(res.connection, g);
  const ConformalMetric gt = rescale_metric(g, sf);
  const Step2Report rep = step2_verify(res.connection, g);

  std::ostringstream sig_csv, gt_csv;
  sig_csv << "site,sigma\n";
  gt_csv << "site,c\n";
  for (std::int64_t x = 0; x < lat->num_sites(); ++x) {
    sig_csv << x << ',' << fmt(sf.at(x)) << '\n';
    gt_csv << x << ',' << fmt(gt.c(x)) << '\n';
  }
  atomic_write_text(join(cfg.out_dir, "sigma.csv"), sig_csv.str());
  atomic_write_text(join(cfg.out_dir, "gtilde.csv"), gt_csv.str());

  txt << "r_ym_norm: " << fmt(rep.r_ym_norm) << "\n"
      << "r_bi_norm: " << fmt(rep.r_bi_norm) << "\n"
      << "r_bi_norm_rescaled: " << fmt(rep.r_bi_norm_rescaled) << "\n"
      << "max_sigma_pow: " << fmt(rep.max_sigma_pow) << "\n"
      << "proportionality_defect: " << fmt(rep.proportionality_defect)
      << "\n"
      << "functional_eq_residual: " << fmt(rep.functional_eq_residual)
      << "\n"
      << "sigma_min: " << fmt(rep.sigma_min) << "\n"
      << "sigma_max: " << fmt(rep.sigma_max) << "\n";
  if (cfg.conformal_density == "fp") {
    const Step1Report s1 = step1_weight(res.connection, g, cfg.conformal_p);
    txt << "step1_r_weighted_norm: " << fmt(s1.r_weighted_norm) << "\n"
        << "step1_r_rescaled_norm: " << fmt(s1.r_rescaled_norm) << "\n"
        << "step1_identity_defect: " << fmt(s1.identity_defect) << "\n";
  }
  atomic_write_text(join(cfg.out_dir, "conformal_report.txt"), txt.str());
  if (!opt.quiet) std::cout << txt.str();
  return res.status == FlowStatus::Converged ? kExitOk : kExitNoConvergence;
}

int cmd_spectrum(const Options& opt) {
  const RunConfig cfg = load_config(opt);
  if (opt.snapshot_path.empty()) throw ConfigError("missing --snapshot");
  const DecodedSnapshot snap = load_snapshot(opt.snapshot_path);
  const ConformalMetric g =
      ConformalMetric::uniform(snap.connection.lattice(), cfg.metric_scale);
  const DensityF F =
      DensityF::from_name(snap.density_name.empty() ? cfg.density_name
                                                    : snap.density_name,
                          cfg.density_p);
  const SpectrumResult res = spectrum(snap.connection, g, F, cfg.spectrum_k,
                                      cfg.spectrum_tau);
  std::ostringstream csv;
  csv << "index,eigenvalue\n";
  for (std::size_t i = 0; i < res.eigenvalues.size(); ++i) {
    csv << i << ',' << fmt(res.eigenvalues[i]) << '\n';
  }
  atomic_write_text(join(cfg.out_dir, "eigenvalues.csv"), csv.str());
  if (!opt.quiet) {
    std::cout << "method:   " << res.method << "\n"
              << "dim:      " << res.dim << "\n"
              << "tau:      " << fmt(res.tau) << "\n"
              << "index:    " << res.index << "\n"
              << "nullity:  " << res.nullity << "\n";
    if (res.gauge_rank >= 0) {
      std::cout << "gauge_rank: " << res.gauge_rank << "\n";
    }
    if (!res.converged) {
      std::cout << "eigensolver not converged, max residual "
                << fmt(res.max_residual) << "\n";
    }
  }
  return res.converged ? kExitOk : kExitNoConvergence;
}

int cmd_stress(const Options& opt) {
  const RunConfig cfg = load_config(opt);
  if (opt.snapshot_path.empty()) throw ConfigError("missing --snapshot");
  const DecodedSnapshot snap = load_snapshot(opt.snapshot_path);
  const auto lat = snap.connection.lattice();
  const ConformalMetric g = ConformalMetric::uniform(lat, cfg.metric_scale);
  const DensityF F = cfg.density();

  const StressTensor S = stress_energy(snap.connection, g, F);
  const CovectorField dd = div_direct(S, g);
  const DivFormula df = div_formula(snap.connection, g);

  const int n = lat->dim();
  std::ostringstream csv;
  csv << "site";
  for (int k = 0; k < n; ++k) {
    for (int l = k; l < n; ++l) csv << ",S_" << k << l;
  }
  csv << ",trace";
  for (int k = 0; k < n; ++k) csv << ",div_direct_" << k;
  for (int k = 0; k < n; ++k) csv << ",div_formula_" << k;
  csv << '\n';
  for (std::int64_t x = 0; x < lat->num_sites(); ++x) {
    csv << x;
    for (int k = 0; k < n; ++k) {
      for (int l = k; l < n; ++l) csv << ',' << fmt(S.at(x, k, l));
    }
    csv << ',' << fmt(S.trace(x));
    for (int k = 0; k < n; ++k) csv << ',' << fmt(dd.at(x, k));
    for (int k = 0; k < n; ++k) csv << ',' << fmt(df.total.at(x, k));
    csv << '\n';
  }
  atomic_write_text(join(cfg.out_dir, "stress.csv"), csv.str());

  CovectorField diff = dd;
  for (std::size_t i = 0; i < diff.v.size(); ++i) {
    diff.v[i] -= df.total.v[i];
  }
  std::ostringstream txt;
  txt << "div_direct_norm: " << fmt(dd.l2_norm()) << "\n"
      << "div_formula_norm: " << fmt(df.total.l2_norm()) << "\n"
      << "div_difference_norm: " << fmt(diff.l2_norm()) << "\n"
      << "coderivative_term_norm: " << fmt(df.coderivative_term.l2_norm())
      << "\n"
      << "bianchi_term_norm: " << fmt(df.bianchi_term.l2_norm()) << "\n"
      << "residual_factor_norm: " << fmt(df.residual_factor_norm) << "\n";
  atomic_write_text(join(cfg.out_dir, "stress_report.txt"), txt.str());
  if (!opt.quiet) std::cout << txt.str();
  return kExitOk;
}

int cmd_export(const Options& opt) {
  if (opt.snapshot_path.empty()) throw ConfigError("missing --snapshot");
  const DecodedSnapshot snap = load_snapshot(opt.snapshot_path);
  const auto lat = snap.connection.lattice();
  const int n = lat->dim();
  const int m = snap.connection.fiber_dim();
  std::ostringstream csv;
  csv << "site,mu,i,j,value\n";
  for (std::int64_t x = 0; x < lat->num_sites(); ++x) {
    for (int mu = 0; mu < n; ++mu) {
      const double* a = snap.connection.alpha.at(x, mu);
      for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
          csv << x << ',' << mu << ',' << i << ',' << j << ','
              << fmt(a[i * m + j]) << '\n';
        }
      }
    }
  }
  const std::string dir = opt.out_dir.empty() ? "." : opt.out_dir;
  atomic_write_text(join(dir, "connection.csv"), csv.str());
  if (!opt.quiet) {
    std::cout << "wrote " << join(dir, "connection.csv") << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  biym::init_threads_from_env();

  CLI::App app{"lattice laboratory for Born-Infeld-Yang-Mills functionals"};
  app.require_subcommand(1);

  Options opt;
  app.add_option("--config", opt.config_path, "run configuration file");
  app.add_option("--snapshot", opt.snapshot_path, "connection snapshot");
  app.add_option("--out", opt.out_dir, "output directory");
  app.add_option("--seed", opt.seed, "override the configured seed");
  app.add_flag("--quiet", opt.quiet, "suppress normal output");

  auto* verify = app.add_subcommand("verify", "run the identity battery");
  auto* flow = app.add_subcommand("flow", "minimize the configured energy");
  auto* conformal =
      app.add_subcommand("conformal", "run the conformal rescaling pipeline");
  auto* spectrum =
      app.add_subcommand("spectrum", "second-variation eigenvalues");
  auto* stress = app.add_subcommand("stress", "stress tensor and divergences");
  auto* export_ = app.add_subcommand("export", "dump a snapshot as CSV");
  for (auto* sub : {verify, flow, conformal, spectrum, stress, export_}) {
    sub->fallthrough();  // global flags may follow the subcommand
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) return cmd_verify(opt);
    if (flow->parsed()) return cmd_flow(opt);
    if (conformal->parsed()) return cmd_conformal(opt);
    if (spectrum->parsed()) return cmd_spectrum(opt);
    if (stress->parsed()) return cmd_stress(opt);
    if (export_->parsed()) return cmd_export(opt);
  } catch (const biym::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const biym::UnsupportedConfig& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const biym::NoConvergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
