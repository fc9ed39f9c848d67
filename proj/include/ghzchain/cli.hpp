#pragma once

// Command-line front end. Every subcommand writes its CSV output plus a JSON
// manifest (resolved spec, seed, arguments, outputs, timing) into --out, with
// the spec hash in the file names.
//
// Exit codes: 0 success, 2 configuration or usage error, 1 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ghzchain/config.hpp"
#include "ghzchain/core_model.hpp"
#include "ghzchain/csv.hpp"
#include "ghzchain/dynamics.hpp"
#include "ghzchain/experiments.hpp"
#include "ghzchain/oracle.hpp"
#include "ghzchain/spectral.hpp"
#include "ghzchain/sta.hpp"

namespace ghzchain {

inline constexpr const char* kToolVersion = "1.0.0";

inline nlohmann::json spec_to_json(const ChainSpec& s) {
  nlohmann::json j;
  j["N"] = s.N;
  j["scheme"] = std::string(1, scheme_name(s.scheme));
  j["g0"] = s.g0;
  j["T"] = s.T;
  j["tau"] = s.pulse_width();
  j["tau_divisor"] = s.tau_divisor;
  j["delta1"] = s.delta1;
  j["delta2"] = s.delta2;
  j["jprime_scale"] = s.jprime_scale;
  j["omega_edge"] = s.omega_edge;
  j["stark_compensation"] = s.stark_compensation;
  j["gamma"] = s.gamma;
  j["kappa"] = s.kappa;
  j["disorder_delta"] = s.disorder_delta;
  j["seed"] = s.seed;
  return j;
}

namespace cli_detail {

struct Overrides {
  std::string config;
  std::string N, scheme, g0T, delta, gamma, kappa, seed;
  std::string out = ".";
  std::size_t samples = 101;
  std::size_t points = 401;
};

struct Outcome {
  std::vector<std::string> files;
  nlohmann::json results = nlohmann::json::object();
};

inline std::vector<double> parse_list(const std::string& key, const std::string& text) {
  return config_detail::to_list(key, text);
}

inline std::vector<int> parse_int_list(const std::string& key, const std::string& text) {
  std::vector<int> out;
  for (double v : parse_list(key, text)) {
    if (v != std::floor(v)) throw ConfigError(key, "expected integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

/// Resolves the spec: defaults, then the config file, then flag overrides.
/// `list_delta` leaves --delta alone (disorder-sweep reads it as a grid).
inline ChainSpec resolve_spec(const Overrides& o, bool list_delta) {
  ChainSpec s;
  if (!o.config.empty()) s = load_config(o.config, s);
  if (!o.N.empty()) set_config_value(s, "N", o.N);
  if (!o.scheme.empty()) set_config_value(s, "scheme", o.scheme);
  if (!o.g0T.empty()) set_config_value(s, "T", o.g0T);
  if (!o.delta.empty() && !list_delta) set_config_value(s, "disorder_delta", o.delta);
  if (!o.gamma.empty()) set_config_value(s, "gamma", o.gamma);
  if (!o.kappa.empty()) set_config_value(s, "kappa", o.kappa);
  if (!o.seed.empty()) set_config_value(s, "seed", o.seed);
  return s;
}

inline void write_atomically(const std::filesystem::path& path, const std::string& text) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + tmp + "'");
    f << text;
    if (!f) throw std::runtime_error("write failed for '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

class Output {
 public:
  Output(std::string dir, std::string stem) : dir_(std::move(dir)), stem_(std::move(stem)) {
    std::filesystem::create_directories(dir_);
  }

  std::string path(const std::string& suffix) const { return (dir_ / (stem_ + suffix)).string(); }

  /// Writes the buffered CSV and records it.
  void csv(const std::string& suffix, const std::ostringstream& body, Outcome& oc) const {
    const auto p = path(suffix);
    write_atomically(p, body.str());
    oc.files.push_back(p);
  }

 private:
  std::filesystem::path dir_;
  std::string stem_;
};

inline std::vector<std::string> header_with(const std::string& first, const std::string& prefix, std::size_t n) {
  std::vector<std::string> h{first};
  for (std::size_t i = 1; i <= n; ++i) h.push_back(prefix + std::to_string(i));
  return h;
}

inline void write_trace(std::ostringstream& os, const EvolutionTrace& tr, const std::vector<std::string>& names,
                        const std::map<std::string, std::vector<double>>& curves) {
  std::vector<std::string> h{"t", "norm"};
  for (const auto& n : names) h.push_back(n);
  CsvWriter w(os, h);
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    std::vector<double> row{tr.times[k], tr.norms[k]};
    for (const auto& n : names) row.push_back(curves.at(n)[k]);
    w.row(row);
  }
}

inline void write_sweep(std::ostringstream& os, const SweepResult& r) {
  std::vector<std::string> h = r.axes;
  h.insert(h.end(), {"mean_F", "stderr", "n_samples"});
  CsvWriter w(os, h);
  for (const auto& p : r.points) {
    std::vector<double> row = p.coords;
    row.insert(row.end(), {p.mean, p.stderr_, static_cast<double>(p.samples)});
    w.row(row);
  }
}

inline nlohmann::json sweep_json(const SweepResult& r) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : r.points) pts.push_back({{"coords", p.coords}, {"mean_F", p.mean}, {"stderr", p.stderr_}, {"n_samples", p.samples}});
  return {{"axes", r.axes}, {"points", pts}, {"spec_hash", r.spec_hash}, {"seed", r.seed}};
}

}  // namespace cli_detail

/// Entry point; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  using namespace cli_detail;
  CLI::App app{"Topological GHZ-state generation in a qutrit-resonator chain"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1, 1);
  app.fallthrough();

  Overrides o;
  app.add_option("-c,--config", o.config, "configuration file (key = value)");
  app.add_option("--N", o.N, "number of qutrits");
  app.add_option("--scheme", o.scheme, "protocol scheme: A, B or C");
  app.add_option("--g0T", o.g0T, "total evolution time in units of 1/g0");
  app.add_option("--delta", o.delta, "disorder bound (a comma list for disorder-sweep)");
  app.add_option("--gamma", o.gamma, "qutrit decay rate(s) in units of g0");
  app.add_option("--kappa", o.kappa, "resonator decay rate(s) in units of g0");
  app.add_option("--seed", o.seed, "random seed");
  app.add_option("--out", o.out, "output directory");
  app.add_option("--samples", o.samples, "disorder samples per point")->check(CLI::PositiveNumber);
  app.add_option("--points", o.points, "time-grid samples for traces")->check(CLI::Range(2, 1000000));

  auto* spectrum = app.add_subcommand("spectrum", "instantaneous spectrum along the pulse: t, E_1..E_dim");
  auto* zero_mode = app.add_subcommand("zero-mode", "zero-mode site distribution along the pulse: t, p_1..p_dim");
  auto* evolve_cmd = app.add_subcommand("evolve", "evolve a named initial state: t, norm, populations");
  std::string initial = "initial";
  std::vector<std::string> projectors{"G", "l", "r", "initial", "ideal"};
  evolve_cmd->add_option("--initial", initial, "initial state name (G, l, r, initial, ideal, or a basis label)");
  evolve_cmd->add_option("--project", projectors, "populations to record");
  auto* ghz = app.add_subcommand("ghz", "GHZ protocol trace: t, norm, F_ideal, P_initial, P_l, P_r");
  auto* dis = app.add_subcommand("disorder-sweep", "mean fidelity per disorder bound: delta, mean_F, stderr, n_samples");
  bool dis_fit_T = false;
  dis->add_flag("--fit-T", dis_fit_T, "use the fitted threshold time for g0T");
  auto* loss = app.add_subcommand("loss-sweep", "fidelity over decay rates: gamma, kappa, mean_F, stderr, n_samples");
  std::string gammas = "0", kappas = "0";
  bool edge_lossless = false, loss_fit_T = false;
  loss->add_option("--gammas", gammas, "comma list of qutrit decay rates");
  loss->add_option("--kappas", kappas, "comma list of resonator decay rates");
  loss->add_flag("--edge-lossless", edge_lossless, "no decay on the first and last qutrits");
  loss->add_flag("--fit-T", loss_fit_T, "use the fitted threshold time for g0T");
  auto* thr = app.add_subcommand("threshold", "shortest g0T reaching the target GHZ fidelity: N, T_star, F");
  double target = 0.999;
  thr->add_option("--target", target, "target fidelity")->check(CLI::Range(0.0, 1.0));
  auto* fit = app.add_subcommand("fit", "threshold times over N and their quadratic fit: N, T_star");
  std::string fit_Ns = "10,15,20,25,30,35,40,45,50,55,60";
  fit->add_option("--Ns", fit_Ns, "comma list of chain sizes");
  fit->add_option("--target", target, "target fidelity")->check(CLI::Range(0.0, 1.0));
  auto* scale = app.add_subcommand("scale-study", "fidelity versus N at physical coupling and coherence: N, mean_F, ...");
  double f_mhz = 50.0, tau_a = 1e-3, tau_b = 1e-3;
  std::string scale_Ns = "10,20,30,40,50,60,70,80,90,100,110,120,130,140,150";
  scale->add_option("--f-mhz", f_mhz, "g0 / 2pi in MHz")->check(CLI::PositiveNumber);
  scale->add_option("--tau-a", tau_a, "qutrit coherence time in seconds")->check(CLI::PositiveNumber);
  scale->add_option("--tau-b", tau_b, "resonator coherence time in seconds")->check(CLI::PositiveNumber);
  scale->add_option("--Ns", scale_Ns, "comma list of chain sizes");
  auto* sta = app.add_subcommand("sta", "transfer with counterdiabatic control: t, norm, P_l, P_r (+ alpha profile)");
  std::string mode = "full_rank";
  double alpha_scale = 1.0;
  sta->add_option("--mode", mode, "full_rank or nnn_truncated");
  sta->add_option("--alpha-scale", alpha_scale, "multiplier on the control");
  auto* oracle = app.add_subcommand("oracle-check", "subspace versus full-space deviation (N <= 4)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  const auto started = std::chrono::steady_clock::now();
  auto* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  try {
    ChainSpec spec = resolve_spec(o, sub == dis);
    if ((sub == dis && dis_fit_T) || (sub == loss && loss_fit_T)) spec.T = fitted_threshold_time(spec.N);
    for (const auto& w : validate(spec)) err << "warning: " << w << "\n";
    const std::string hash = spec_hash(spec);
    const Output files(o.out, name + "_" + hash);
    Outcome oc;
    const auto grid = uniform_grid(spec.T, o.points);

    if (sub == spectrum || sub == zero_mode) {
      if (!spec.lossless()) err << "warning: decay rates are ignored for eigenanalysis\n";
      std::ostringstream os;
      const auto d = static_cast<std::size_t>(spec.dimension());
      if (sub == spectrum) {
        CsvWriter w(os, header_with("t", "E_", d));
        const auto flow = spectral_flow(spec, grid);
        double worst = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
          std::vector<double> row{grid[k]};
          for (Eigen::Index i = 0; i < flow[k].eigenvalues.size(); ++i) row.push_back(flow[k].eigenvalues(i));
          w.row(row);
          worst = std::max(worst, std::abs(flow[k].zero_energy()));
        }
        oc.results["max_abs_zero_energy"] = worst;
      } else {
        CsvWriter w(os, header_with("t", "p_", d));
        const auto rows = zero_mode_distribution(spec, grid);
        for (std::size_t k = 0; k < grid.size(); ++k) {
          std::vector<double> row{grid[k]};
          row.insert(row.end(), rows[k].begin(), rows[k].end());
          w.row(row);
        }
      }
      files.csv(".csv", os, oc);
    } else if (sub == evolve_cmd || sub == ghz) {
      const bool lossy = !spec.lossless();
      const auto realization = apply_disorder(spec, 0);
      const StateVector psi0 = sub == ghz ? ghz_initial_state(spec) : named_state(spec, initial);
      const auto tr = evolve(spec, realization, psi0, grid, lossy);
      std::vector<std::string> names = sub == ghz ? std::vector<std::string>{"ideal", "initial", "l", "r"} : projectors;
      const auto curves = populations(spec, tr, names);
      std::ostringstream os;
      if (sub == ghz) {
        std::map<std::string, std::vector<double>> renamed{
            {"F_ideal", curves.at("ideal")}, {"P_initial", curves.at("initial")}, {"P_l", curves.at("l")}, {"P_r", curves.at("r")}};
        write_trace(os, tr, {"F_ideal", "P_initial", "P_l", "P_r"}, renamed);
        oc.results["final_fidelity"] = curves.at("ideal").back();
        out << "final fidelity " << format_number(curves.at("ideal").back()) << "\n";
      } else {
        write_trace(os, tr, names, curves);
      }
      oc.results["final_norm"] = tr.norms.back();
      oc.results["lossy"] = lossy;
      oc.results["step"] = tr.step;
      files.csv(".csv", os, oc);
    } else if (sub == dis) {
      std::vector<double> deltas = o.delta.empty() ? std::vector<double>{0.0, 0.1, 0.2, 0.3, 0.4, 0.5}
                                                   : parse_list("disorder_delta", o.delta);
      if (!spec.lossless()) throw ConfigError("gamma", "disorder sweeps are lossless; set gamma = kappa = 0");
      const auto r = disorder_sweep(spec, deltas, o.samples);
      std::ostringstream os;
      write_sweep(os, r);
      files.csv(".csv", os, oc);
      oc.results = sweep_json(r);
      for (const auto& p : r.points)
        out << "delta " << format_number(p.coords[0]) << " mean F " << format_number(p.mean) << " +- "
            << format_number(p.stderr_) << "\n";
    } else if (sub == loss) {
      const auto r = loss_sweep(spec, parse_list("gamma", gammas), parse_list("kappa", kappas), edge_lossless);
      std::ostringstream os;
      write_sweep(os, r);
      files.csv(".csv", os, oc);
      oc.results = sweep_json(r);
      oc.results["edge_lossless"] = edge_lossless;
      for (const auto& p : r.points)
        out << "gamma " << format_number(p.coords[0]) << " kappa " << format_number(p.coords[1]) << " F "
            << format_number(p.mean) << "\n";
    } else if (sub == thr) {
      const auto r = threshold_time(spec, target);
      std::ostringstream os;
      CsvWriter w(os, {"N", "T_star", "F"});
      w.row(std::vector<double>{static_cast<double>(spec.N), r.T_star, r.fidelity});
      files.csv(".csv", os, oc);
      oc.results = {{"T_star", r.T_star}, {"fidelity", r.fidelity}, {"evaluations", r.evaluations}, {"target", target}};
      out << format_number(r.T_star) << "\n";
    } else if (sub == fit) {
      const auto Ns = parse_int_list("N", fit_Ns);
      std::vector<double> Ts(Ns.size());
      parallel_for(Ns.size(), [&](std::size_t i) {
        ChainSpec s = spec;
        s.N = Ns[i];
        Ts[i] = threshold_time(s, target).T_star;
      });
      std::vector<std::pair<double, double>> pts;
      for (std::size_t i = 0; i < Ns.size(); ++i) pts.emplace_back(Ns[i], Ts[i]);
      const auto f = fit_quadratic(pts);
      std::ostringstream os;
      CsvWriter w(os, {"N", "T_star"});
      for (const auto& [n, t] : pts) w.row(std::vector<double>{n, t});
      files.csv(".csv", os, oc);
      oc.results = {{"a", f.a}, {"b", f.b}, {"c", f.c}, {"residual_norm", f.residual_norm}};
      out << "g0T = " << format_number(f.a) << " N^2 + " << format_number(f.b) << " N + " << format_number(f.c) << "\n";
    } else if (sub == scale) {
      const auto cfg = ScaleStudyConfig::at_mhz(f_mhz, tau_a, tau_b, parse_int_list("N", scale_Ns));
      const auto r = scale_study(cfg, spec.scheme);
      std::ostringstream os;
      write_sweep(os, r);
      files.csv(".csv", os, oc);
      oc.results = sweep_json(r);
      oc.results["g0_over_2pi_MHz"] = f_mhz;
      oc.results["gamma"] = cfg.gamma();
      oc.results["kappa"] = cfg.kappa();
      for (const auto& p : r.points) out << "N " << p.coords[0] << " F " << format_number(p.mean) << "\n";
    } else if (sub == sta) {
      const auto m = parse_control_mode(mode);
      StaOptions so;
      so.alpha_scale = alpha_scale;
      const auto tr = evolve_with_sta(spec, m, grid, so);
      const auto curves = populations(spec, tr, {"l", "r"});
      std::ostringstream os;
      write_trace(os, tr, {"l", "r"}, curves);
      files.csv(".csv", os, oc);
      std::ostringstream as;
      CsvWriter w(as, header_with("t", "alpha_", static_cast<std::size_t>(spec.N - 1)));
      for (double t : grid) {
        std::vector<double> row{t};
        for (double a : counterdiabatic_control(spec, t, m).alpha()) row.push_back(alpha_scale * a);
        w.row(row);
      }
      files.csv("_alpha.csv", as, oc);
      oc.results = {{"mode", control_mode_name(m)}, {"transfer_fidelity", curves.at("r").back()}, {"final_norm", tr.norms.back()}};
      out << "transfer fidelity " << format_number(curves.at("r").back()) << "\n";
    } else if (sub == oracle) {
      if (spec.N > kOracleMaxN) throw ConfigError("N", "oracle-check supports N <= " + std::to_string(kOracleMaxN));
      const double dev = compare_subspace_oracle(spec, grid);
      std::ostringstream os;
      CsvWriter w(os, {"N", "max_deviation"});
      w.row(std::vector<double>{static_cast<double>(spec.N), dev});
      files.csv(".csv", os, oc);
      oc.results["max_deviation"] = dev;
      out << "max deviation " << format_number(dev) << "\n";
    }

    nlohmann::json manifest;
    manifest["subcommand"] = name;
    manifest["tool_version"] = kToolVersion;
    manifest["spec"] = spec_to_json(spec);
    manifest["config"] = serialize_config(spec);
    manifest["spec_hash"] = hash;
    manifest["seed"] = spec.seed;
    manifest["workers"] = worker_count();
    std::vector<std::string> args(argv, argv + argc);
    manifest["argv"] = args;
    manifest["outputs"] = oc.files;
    manifest["results"] = oc.results;
    manifest["duration_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    const auto mpath = files.path(".json");
    write_atomically(mpath, manifest.dump(2) + "\n");
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ghzchain
