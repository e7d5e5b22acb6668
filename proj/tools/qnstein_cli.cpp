#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qnstein/bench/config.hpp"
#include "qnstein/bench/csv.hpp"
#include "qnstein/bench/presets.hpp"
#include "qnstein/bench/runner.hpp"

namespace {

using namespace qnstein;
using namespace qnstein::bench;

int execute(const RunConfig& cfg) {
  std::cerr << "running " << cfg.optimizers.size() << " optimizer(s) x " << cfg.qubits.size() * cfg.layers.size()
            << " size(s) x " << cfg.seeds.size() << " seed(s)\n";
  const BenchmarkResult result = run_benchmark(cfg);
  const auto files = emit_csv(result, cfg.output);
  for (const auto& g : result.groups) {
    const auto rows = aggregate(g);
    std::cout << group_stem(g) << ": " << g.runs.size() - g.failures() << "/" << g.runs.size() << " runs ok";
    if (!rows.empty()) std::cout << ", final mean energy error " << format_double(rows.back().mean_energy_error);
    std::cout << '\n';
    for (const auto& r : g.runs)
      if (r.failed) std::cout << "  seed " << r.seed << " failed: " << r.failure << '\n';
  }
  std::cout << "wrote " << files.size() << " files to " << cfg.output << '\n';
  if (result.failures() > 0) std::cout << result.failures() << " run(s) failed\n";
  return 0;
}

void print_metric_row(const std::string& name, const Matrix& m) {
  std::printf("%-16s", name.c_str());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i; j < m.cols(); ++j) std::printf(" %12.6f", m(i, j));
  std::printf("\n");
}

int metric_check(const std::string& ansatz, int qubits, int layers, int samples, double c, double b,
                 std::uint64_t seed) {
  Circuit circ = ansatz == "ry" ? single_qubit_ry()
                 : ansatz == "hea" ? hardware_efficient(qubits, layers)
                                   : schwinger_ansatz(qubits, layers);
  RandomStream rng(seed);
  Params theta(circ.param_count());
  for (Eigen::Index i = 0; i < theta.size(); ++i) theta[i] = rng.uniform(-M_PI, M_PI);
  if (ansatz == "ry") theta[0] = 0.7;
  ScalarOracle fid([&](const Params& x) { return fidelity(circ, theta, x); });
  const SmoothingParams p{c, b, samples, GaussianScale::Product};

  std::printf("ansatz %s, d = %d, N = %d, c = %g, b = %g\n", ansatz.c_str(), circ.param_count(), samples, c, b);
  std::printf("%-16s", "method");
  for (int i = 0; i < circ.param_count(); ++i)
    for (int j = i; j < circ.param_count(); ++j) std::printf(" %12s", ("F" + std::to_string(i) + "," + std::to_string(j)).c_str());
  std::printf("\n");
  print_metric_row("stein-2eval", stein_metric_2eval(fid, theta, p, rng).matrix);
  print_metric_row("stein-3eval", stein_metric_3eval(fid, theta, p, rng).matrix);
  print_metric_row("spsa", spsa_metric(fid, theta, c, samples, rng).matrix);
  if (circ.single_use_parameters()) print_metric_row("parameter-shift", parameter_shift_metric(circ, theta, std::nullopt, rng).matrix);
  print_metric_row("exact", exact_metric(circ, theta).matrix);
  return 0;
}

std::vector<int> parse_int_list(const std::string& s, const char* flag) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(std::string(flag) + ": expected a comma-separated integer list, got '" + s + "'");
    }
  }
  if (out.empty()) throw ConfigError(std::string(flag) + ": empty list");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stein-estimator quantum natural gradient workbench"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "Run a benchmark described by a YAML config");
  run_cmd->add_option("config", config_path, "Config file")->required();

  std::string preset_name, qubits_arg, layers_arg, out_arg;
  int seeds_arg = 0, steps_arg = -1;
  std::uint64_t seed_offset = 0;
  auto* preset_cmd = app.add_subcommand("preset", "Run a named experiment preset");
  preset_cmd->add_option("name", preset_name, "tfim-fig2 | tfim-layers | schwinger-fig5 | appendixC")->required();
  auto* q_opt = preset_cmd->add_option("--qubits", qubits_arg, "Qubit counts, comma separated");
  auto* l_opt = preset_cmd->add_option("--layers", layers_arg, "Layer counts, comma separated");
  auto* s_opt = preset_cmd->add_option("--seeds", seeds_arg, "Number of seeds");
  auto* st_opt = preset_cmd->add_option("--steps", steps_arg, "Steps per run");
  auto* o_opt = preset_cmd->add_option("--out", out_arg, "Output directory");
  preset_cmd->add_option("--seed-offset", seed_offset, "First seed");
  bool print_config = false;
  preset_cmd->add_flag("--print-config", print_config, "Print the expanded config and exit");

  std::string model;
  int ex_qubits = 2;
  double J = -1.0, h = -2.0, x = 1.0, mu = 0.5, l = 0.0;
  auto* exact_cmd = app.add_subcommand("exact", "Print the exact ground energy");
  exact_cmd->set_help_flag("--help", "Print this help message and exit");
  exact_cmd->add_option("model", model, "tfim | schwinger")->required()->check(CLI::IsMember({"tfim", "schwinger"}));
  exact_cmd->add_option("--qubits", ex_qubits, "Qubit count");
  exact_cmd->add_option("--J", J, "TFIM coupling");
  exact_cmd->add_option("--h", h, "TFIM field");
  exact_cmd->add_option("--x", x, "Schwinger hopping");
  exact_cmd->add_option("--mu", mu, "Schwinger mass");
  exact_cmd->add_option("--l", l, "Schwinger background field");

  std::string mc_ansatz = "ry";
  int mc_qubits = 2, mc_layers = 1, mc_samples = 100000;
  double mc_c = 0.01, mc_b = 1.0;
  std::uint64_t mc_seed = 1;
  auto* mc_cmd = app.add_subcommand("metric-check", "Compare metric estimators at a random point");
  mc_cmd->add_option("--ansatz", mc_ansatz, "ry | hea | so4")->check(CLI::IsMember({"ry", "hea", "so4"}));
  mc_cmd->add_option("--qubits", mc_qubits, "Qubit count (hea, so4)");
  mc_cmd->add_option("--layers", mc_layers, "Layer count (hea, so4)");
  mc_cmd->add_option("--samples", mc_samples, "Samples per estimator");
  mc_cmd->add_option("--c", mc_c, "Perturbation magnitude");
  mc_cmd->add_option("--b", mc_b, "Gaussian scale");
  mc_cmd->add_option("--seed", mc_seed, "Seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 2;
  }

  try {
    if (*run_cmd) {
      std::ifstream f(config_path);
      if (!f) throw std::runtime_error("cannot read '" + config_path + "'");
      std::stringstream text;
      text << f.rdbuf();
      return execute(parse_config(text.str()));
    }
    if (*preset_cmd) {
      PresetOverrides ov;
      if (*q_opt) ov.qubits = parse_int_list(qubits_arg, "--qubits");
      if (*l_opt) ov.layers = parse_int_list(layers_arg, "--layers");
      if (*s_opt) ov.seeds = seeds_arg;
      if (*st_opt) ov.steps = steps_arg;
      if (*o_opt) ov.output = out_arg;
      ov.seed_offset = seed_offset;
      const RunConfig cfg = preset(preset_name, ov);
      if (print_config) {
        std::cout << serialize_config(cfg);
        return 0;
      }
      return execute(cfg);
    }
    if (*exact_cmd) {
      const double e = model == "tfim"
                           ? (ex_qubits <= 10 ? exact_ground_energy(build_tfim(ex_qubits, J, h))
                                                           : tfim_ground_energy(ex_qubits, J, h))
                           : exact_ground_energy(build_schwinger(ex_qubits, x, mu, l));
      std::printf("%.12f\n", e);
      return 0;
    }
    if (*mc_cmd) return metric_check(mc_ansatz, mc_qubits, mc_layers, mc_samples, mc_c, mc_b, mc_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
