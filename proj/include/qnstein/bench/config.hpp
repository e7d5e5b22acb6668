#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "qnstein/ansatz.hpp"
#include "qnstein/optimizers.hpp"

namespace qnstein::bench {

enum class Model { Tfim, Schwinger };

/// The Schwinger reference energy comes from dense diagonalization.
inline constexpr int kMaxSchwingerQubits = 12;

struct ProblemSpec {
  Model model = Model::Tfim;
  // TFIM
  double coupling = -1.0;
  double field = -2.0;
  // Schwinger
  double hopping = 1.0;
  double mass = 0.5;
  double background = 0.0;

  bool operator==(const ProblemSpec&) const = default;
};

struct OptimizerEntry {
  OptimizerKind kind;
  std::string label;
  OptimizerConfig config;

  bool operator==(const OptimizerEntry&) const = default;
};

/// One experiment grid: every optimizer entry on every (qubits, layers)
/// pair, for every seed.
struct RunConfig {
  ProblemSpec problem;
  std::vector<int> qubits;
  std::vector<int> layers;
  AnsatzKind ansatz = AnsatzKind::HardwareEfficient;
  BondPattern bonds = BondPattern::BrickWall;
  InitialState initial = InitialState::Staggered;
  std::vector<OptimizerEntry> optimizers;
  std::vector<std::uint64_t> seeds;
  std::string output = "out";

  bool operator==(const RunConfig&) const = default;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

[[noreturn]] inline void fail(const YAML::Node& node, const std::string& msg) {
  const YAML::Mark m = node.Mark();
  if (m.is_null()) throw ConfigError("config: " + msg);
  throw ConfigError("config line " + std::to_string(m.line + 1) + ": " + msg);
}

inline void check_keys(const YAML::Node& node, const std::set<std::string>& allowed, const std::string& where) {
  if (!node.IsMap()) fail(node, where + " must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "' in " + where);
  }
}

template <class T>
T scalar(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) fail(node, "'" + key + "' must be a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(node, "'" + key + "' has an invalid value '" + node.Scalar() + "'");
  }
}

template <class T>
std::vector<T> list_or_scalar(const YAML::Node& node, const std::string& key) {
  std::vector<T> out;
  if (node.IsSequence()) {
    for (const auto& item : node) out.push_back(scalar<T>(item, key));
  } else {
    out.push_back(scalar<T>(node, key));
  }
  if (out.empty()) fail(node, "'" + key + "' must not be empty");
  return out;
}

inline const char* model_name(Model m) { return m == Model::Tfim ? "tfim" : "schwinger"; }
inline const char* ansatz_name(AnsatzKind k) {
  return k == AnsatzKind::HardwareEfficient ? "hardware_efficient" : "schwinger_so4";
}
inline const char* bonds_name(BondPattern b) { return b == BondPattern::BrickWall ? "brick_wall" : "sequential"; }
inline const char* initial_name(InitialState s) { return s == InitialState::Staggered ? "staggered" : "zero"; }
inline const char* scale_name(GaussianScale s) { return s == GaussianScale::Product ? "product" : "covariance"; }

inline const std::set<std::string> kOptimizerKeys = {
    "learning_rate", "c", "b", "samples", "regularization", "shots", "max_steps", "blocking",
    "blocking_tolerance_multiplier", "average_on_blocked", "gaussian_scale"};

inline void apply_optimizer_keys(const YAML::Node& node, OptimizerConfig& cfg) {
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    const YAML::Node& v = kv.second;
    if (key == "learning_rate") cfg.learning_rate = scalar<double>(v, key);
    else if (key == "c") cfg.c = scalar<double>(v, key);
    else if (key == "b") cfg.b = scalar<double>(v, key);
    else if (key == "samples") cfg.samples = scalar<int>(v, key);
    else if (key == "regularization") cfg.regularization = scalar<double>(v, key);
    else if (key == "shots") {
      if (v.IsNull()) {
        cfg.shots.reset();
      } else {
        const auto s = scalar<long long>(v, key);
        if (s < 0) fail(v, "'shots' must be non-negative");
        if (s == 0) cfg.shots.reset();
        else cfg.shots = static_cast<std::uint64_t>(s);
      }
    } else if (key == "max_steps") cfg.max_steps = scalar<int>(v, key);
    else if (key == "blocking") cfg.blocking = scalar<bool>(v, key);
    else if (key == "blocking_tolerance_multiplier") cfg.blocking_tolerance_multiplier = scalar<double>(v, key);
    else if (key == "average_on_blocked") cfg.average_on_blocked = scalar<bool>(v, key);
    else if (key == "gaussian_scale") {
      const auto s = scalar<std::string>(v, key);
      if (s == "product") cfg.gaussian_scale = GaussianScale::Product;
      else if (s == "covariance") cfg.gaussian_scale = GaussianScale::Covariance;
      else fail(v, "gaussian_scale must be 'product' or 'covariance'");
    }
  }
}

inline void emit_optimizer_keys(YAML::Emitter& out, const OptimizerConfig& cfg) {
  out << YAML::Key << "learning_rate" << YAML::Value << cfg.learning_rate;
  out << YAML::Key << "c" << YAML::Value << cfg.c;
  out << YAML::Key << "b" << YAML::Value << cfg.b;
  out << YAML::Key << "samples" << YAML::Value << cfg.samples;
  out << YAML::Key << "regularization" << YAML::Value << cfg.regularization;
  out << YAML::Key << "shots" << YAML::Value;
  if (cfg.shots) out << *cfg.shots; else out << YAML::Null;
  out << YAML::Key << "max_steps" << YAML::Value << cfg.max_steps;
  out << YAML::Key << "blocking" << YAML::Value << cfg.blocking;
  out << YAML::Key << "blocking_tolerance_multiplier" << YAML::Value << cfg.blocking_tolerance_multiplier;
  out << YAML::Key << "average_on_blocked" << YAML::Value << cfg.average_on_blocked;
  out << YAML::Key << "gaussian_scale" << YAML::Value << scale_name(cfg.gaussian_scale);
}

}  // namespace detail

/// Checks the cross-field guards that individual keys cannot.
inline void validate(const RunConfig& cfg) {
  if (cfg.qubits.empty()) throw ConfigError("config: qubit list is empty");
  if (cfg.layers.empty()) throw ConfigError("config: layer list is empty");
  if (cfg.optimizers.empty()) throw ConfigError("config: optimizer list is empty");
  if (cfg.seeds.empty()) throw ConfigError("config: seed list is empty");
  for (int q : cfg.qubits) {
    if (q < 2) throw ConfigError("config: qubit counts must be at least 2");
    if (q > kMaxSimulatorQubits) throw ConfigError("config: qubit counts above 20 are not supported");
    if ((cfg.problem.model == Model::Schwinger || cfg.ansatz == AnsatzKind::SchwingerSO4) && q % 2 != 0)
      throw ConfigError("config: Schwinger model and SO(4) ansatz need an even qubit count");
    if (cfg.problem.model == Model::Schwinger && q > kMaxSchwingerQubits)
      throw ConfigError("config: Schwinger reference energy needs at most 12 qubits");
  }
  for (int l : cfg.layers)
    if (l < 1) throw ConfigError("config: layer counts must be at least 1");
  std::set<std::string> labels;
  for (const auto& e : cfg.optimizers) {
    try {
      e.config.validate();
    } catch (const std::invalid_argument& ex) {
      throw ConfigError("config: optimizer '" + e.label + "': " + ex.what());
    }
    if (!labels.insert(e.label).second) throw ConfigError("config: duplicate optimizer label '" + e.label + "'");
  }
}

/// Parses the YAML benchmark schema documented in README.md.
inline RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("config line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  using detail::fail;
  using detail::scalar;
  if (!root.IsMap()) throw ConfigError("config: top level must be a mapping");
  detail::check_keys(root, {"problem", "ansatz", "optimizer", "optimizers", "seeds", "output"}, "top level");

  RunConfig cfg;
  const YAML::Node problem = root["problem"];
  if (!problem) throw ConfigError("config: missing 'problem' section");
  detail::check_keys(problem, {"model", "qubits", "J", "h", "x", "mu", "l"}, "problem");
  if (!problem["model"]) fail(problem, "problem.model is required");
  const auto model = scalar<std::string>(problem["model"], "model");
  if (model == "tfim") {
    cfg.problem.model = Model::Tfim;
    for (const char* k : {"x", "mu", "l"})
      if (problem[k]) fail(problem[k], std::string("'") + k + "' is a Schwinger parameter");
    if (problem["J"]) cfg.problem.coupling = scalar<double>(problem["J"], "J");
    if (problem["h"]) cfg.problem.field = scalar<double>(problem["h"], "h");
  } else if (model == "schwinger") {
    cfg.problem.model = Model::Schwinger;
    for (const char* k : {"J", "h"})
      if (problem[k]) fail(problem[k], std::string("'") + k + "' is a TFIM parameter");
    if (problem["x"]) cfg.problem.hopping = scalar<double>(problem["x"], "x");
    if (problem["mu"]) cfg.problem.mass = scalar<double>(problem["mu"], "mu");
    if (problem["l"]) cfg.problem.background = scalar<double>(problem["l"], "l");
  } else {
    fail(problem["model"], "problem.model must be 'tfim' or 'schwinger'");
  }
  if (!problem["qubits"]) fail(problem, "problem.qubits is required");
  cfg.qubits = detail::list_or_scalar<int>(problem["qubits"], "qubits");

  const YAML::Node ansatz = root["ansatz"];
  if (!ansatz) throw ConfigError("config: missing 'ansatz' section");
  detail::check_keys(ansatz, {"kind", "layers", "bonds", "initial_state"}, "ansatz");
  if (ansatz["kind"]) {
    const auto k = scalar<std::string>(ansatz["kind"], "kind");
    if (k == "hardware_efficient") cfg.ansatz = AnsatzKind::HardwareEfficient;
    else if (k == "schwinger_so4") cfg.ansatz = AnsatzKind::SchwingerSO4;
    else fail(ansatz["kind"], "ansatz.kind must be 'hardware_efficient' or 'schwinger_so4'");
  } else {
    cfg.ansatz = cfg.problem.model == Model::Tfim ? AnsatzKind::HardwareEfficient : AnsatzKind::SchwingerSO4;
  }
  if (!ansatz["layers"]) fail(ansatz, "ansatz.layers is required");
  cfg.layers = detail::list_or_scalar<int>(ansatz["layers"], "layers");
  if (ansatz["bonds"]) {
    const auto b = scalar<std::string>(ansatz["bonds"], "bonds");
    if (b == "brick_wall") cfg.bonds = BondPattern::BrickWall;
    else if (b == "sequential") cfg.bonds = BondPattern::Sequential;
    else fail(ansatz["bonds"], "ansatz.bonds must be 'brick_wall' or 'sequential'");
  }
  if (ansatz["initial_state"]) {
    const auto s = scalar<std::string>(ansatz["initial_state"], "initial_state");
    if (s == "staggered") cfg.initial = InitialState::Staggered;
    else if (s == "zero") cfg.initial = InitialState::Zero;
    else fail(ansatz["initial_state"], "ansatz.initial_state must be 'staggered' or 'zero'");
  }

  OptimizerConfig defaults;
  if (const YAML::Node shared = root["optimizer"]) {
    detail::check_keys(shared, detail::kOptimizerKeys, "optimizer");
    detail::apply_optimizer_keys(shared, defaults);
  }

  const YAML::Node list = root["optimizers"];
  if (!list) throw ConfigError("config: missing 'optimizers' list");
  if (!list.IsSequence() || list.size() == 0) fail(list, "'optimizers' must be a non-empty list");
  for (const auto& item : list) {
    OptimizerEntry e{OptimizerKind::GD, "", defaults};
    const YAML::Node kind_node = item.IsMap() ? item["kind"] : item;
    if (!kind_node) fail(item, "optimizer entry needs a 'kind'");
    const auto kind = scalar<std::string>(kind_node, "kind");
    const auto parsed = parse_optimizer(kind);
    if (!parsed) fail(kind_node, "unknown optimizer '" + kind + "'");
    e.kind = *parsed;
    e.label = kind;
    if (item.IsMap()) {
      auto allowed = detail::kOptimizerKeys;
      allowed.insert({"kind", "label"});
      detail::check_keys(item, allowed, "optimizer entry");
      if (item["label"]) e.label = scalar<std::string>(item["label"], "label");
      detail::apply_optimizer_keys(item, e.config);
    }
    cfg.optimizers.push_back(std::move(e));
  }

  const YAML::Node seeds = root["seeds"];
  if (!seeds) throw ConfigError("config: missing 'seeds'");
  if (seeds.IsMap()) {
    detail::check_keys(seeds, {"count", "offset"}, "seeds");
    if (!seeds["count"]) fail(seeds, "seeds.count is required");
    const auto count = scalar<long long>(seeds["count"], "count");
    const auto offset = seeds["offset"] ? scalar<long long>(seeds["offset"], "offset") : 0LL;
    if (count < 1) fail(seeds["count"], "seeds.count must be at least 1");
    if (offset < 0) fail(seeds["offset"], "seeds.offset must be non-negative");
    for (long long s = 0; s < count; ++s) cfg.seeds.push_back(static_cast<std::uint64_t>(offset + s));
  } else {
    for (long long s : detail::list_or_scalar<long long>(seeds, "seeds")) {
      if (s < 0) fail(seeds, "seeds must be non-negative");
      cfg.seeds.push_back(static_cast<std::uint64_t>(s));
    }
  }

  if (root["output"]) cfg.output = scalar<std::string>(root["output"], "output");
  validate(cfg);
  return cfg;
}

/// Fully expanded YAML form; parse_config(serialize_config(c)) == c.
inline std::string serialize_config(const RunConfig& cfg) {
  using namespace detail;
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "problem" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "model" << YAML::Value << model_name(cfg.problem.model);
  out << YAML::Key << "qubits" << YAML::Value << YAML::Flow << cfg.qubits;
  if (cfg.problem.model == Model::Tfim) {
    out << YAML::Key << "J" << YAML::Value << cfg.problem.coupling;
    out << YAML::Key << "h" << YAML::Value << cfg.problem.field;
  } else {
    out << YAML::Key << "x" << YAML::Value << cfg.problem.hopping;
    out << YAML::Key << "mu" << YAML::Value << cfg.problem.mass;
    out << YAML::Key << "l" << YAML::Value << cfg.problem.background;
  }
  out << YAML::EndMap;
  out << YAML::Key << "ansatz" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << ansatz_name(cfg.ansatz);
  out << YAML::Key << "layers" << YAML::Value << YAML::Flow << cfg.layers;
  out << YAML::Key << "bonds" << YAML::Value << bonds_name(cfg.bonds);
  out << YAML::Key << "initial_state" << YAML::Value << initial_name(cfg.initial);
  out << YAML::EndMap;
  out << YAML::Key << "optimizers" << YAML::Value << YAML::BeginSeq;
  for (const auto& e : cfg.optimizers) {
    out << YAML::BeginMap;
    out << YAML::Key << "kind" << YAML::Value << optimizer_name(e.kind);
    out << YAML::Key << "label" << YAML::Value << e.label;
    emit_optimizer_keys(out, e.config);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::Key << "seeds" << YAML::Value << YAML::Flow << cfg.seeds;
  out << YAML::Key << "output" << YAML::Value << cfg.output;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace qnstein::bench
