#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qnstein/bench/config.hpp"

namespace qnstein::bench {

inline constexpr int kDefaultSeedCount = 30;

/// Command-line shrinkers applied on top of a preset.
struct PresetOverrides {
  std::optional<std::vector<int>> qubits;
  std::optional<std::vector<int>> layers;
  std::optional<int> seeds;
  std::optional<int> steps;
  std::optional<std::string> output;
  std::uint64_t seed_offset = 0;
};

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"tfim-fig2", "tfim-layers", "schwinger-fig5", "appendixC"};
  return names;
}

namespace detail {

inline OptimizerConfig tfim_defaults() {
  OptimizerConfig c;
  c.learning_rate = 0.01;
  c.c = 0.05;
  c.b = 2.0;
  c.samples = 10;
  c.regularization = 0.01;
  c.shots = 8192;
  c.max_steps = 300;
  c.blocking = true;
  return c;
}

inline std::vector<OptimizerEntry> all_optimizers(const OptimizerConfig& base) {
  std::vector<OptimizerEntry> out;
  for (OptimizerKind k : kAllOptimizers) {
    OptimizerEntry e{k, optimizer_name(k), base};
    if (k == OptimizerKind::QNG) e.config.regularization = 0.1;
    out.push_back(e);
  }
  return out;
}

}  // namespace detail

inline RunConfig preset(const std::string& name, const PresetOverrides& ov = {}) {
  RunConfig cfg;
  if (name == "tfim-fig2" || name == "tfim-layers") {
    cfg.problem = {Model::Tfim, -1.0, -2.0};
    cfg.ansatz = AnsatzKind::HardwareEfficient;
    cfg.qubits = name == "tfim-fig2" ? std::vector<int>{12, 17, 20} : std::vector<int>{12};
    cfg.layers = name == "tfim-fig2" ? std::vector<int>{3} : std::vector<int>{2, 3, 6};
    cfg.optimizers = detail::all_optimizers(detail::tfim_defaults());
  } else if (name == "schwinger-fig5") {
    cfg.problem.model = Model::Schwinger;
    cfg.problem.hopping = 1.0;
    cfg.problem.mass = 0.5;
    cfg.problem.background = 0.0;
    cfg.ansatz = AnsatzKind::SchwingerSO4;
    cfg.qubits = {4, 6, 8};
    cfg.layers = {2};
    OptimizerConfig base = detail::tfim_defaults();
    base.max_steps = 200;
    base.samples = 15;
    base.shots = 10024;
    cfg.optimizers = detail::all_optimizers(base);
  } else if (name == "appendixC") {
    cfg.problem = {Model::Tfim, -1.0, -2.0};
    cfg.ansatz = AnsatzKind::HardwareEfficient;
    cfg.qubits = {12};
    cfg.layers = {3};
    const OptimizerConfig base = detail::tfim_defaults();
    for (int n : {1, 5, 10, 20}) {
      OptimizerEntry e{OptimizerKind::QNSPSA, "QNSPSA_N" + std::to_string(n), base};
      e.config.samples = n;
      cfg.optimizers.push_back(e);
    }
    for (OptimizerKind k : {OptimizerKind::QNSTEIN2, OptimizerKind::QNSTEIN3}) {
      OptimizerEntry e{k, std::string(optimizer_name(k)) + "_N5", base};
      e.config.samples = 5;
      cfg.optimizers.push_back(e);
    }
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  cfg.output = "out/" + name;

  if (ov.qubits) cfg.qubits = *ov.qubits;
  if (ov.layers) cfg.layers = *ov.layers;
  if (ov.steps) {
    if (*ov.steps < 0) throw ConfigError("--steps must be non-negative");
    for (auto& e : cfg.optimizers) e.config.max_steps = *ov.steps;
  }
  const int count = ov.seeds.value_or(kDefaultSeedCount);
  if (count < 1) throw ConfigError("--seeds must be at least 1");
  for (int s = 0; s < count; ++s) cfg.seeds.push_back(ov.seed_offset + static_cast<std::uint64_t>(s));
  if (ov.output) cfg.output = *ov.output;
  validate(cfg);
  return cfg;
}

}  // namespace qnstein::bench
