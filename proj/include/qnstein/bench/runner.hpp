#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <map>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "qnstein/bench/config.hpp"

namespace qnstein::bench {

/// Environment variable capping the worker pool.
inline constexpr const char* kWorkersEnv = "QNSTEIN_WORKERS";

struct SeedRun {
  std::uint64_t seed = 0;
  std::vector<RunRecord> trace;
  bool failed = false;
  std::string failure;
};

/// Every seed of one optimizer entry on one (qubits, layers) size, sorted by
/// seed.
struct Group {
  std::string label;
  OptimizerKind kind;
  int qubits = 0;
  int layers = 0;
  double ground_energy = 0.0;
  std::vector<SeedRun> runs;

  std::size_t failures() const {
    return static_cast<std::size_t>(std::count_if(runs.begin(), runs.end(), [](const SeedRun& r) { return r.failed; }));
  }
};

struct AggregateRow {
  int step = 0;
  std::size_t count = 0;
  double mean_energy_error = 0.0;
  double std_energy_error = 0.0;
  double mean_loss = 0.0;
  double mean_circuits_per_sample = 0.0;
  double mean_circuits_raw = 0.0;
};

struct BenchmarkResult {
  std::vector<Group> groups;

  std::size_t failures() const {
    std::size_t f = 0;
    for (const auto& g : groups) f += g.failures();
    return f;
  }
};

inline PauliSum build_hamiltonian(const ProblemSpec& p, int qubits) {
  return p.model == Model::Tfim ? build_tfim(qubits, p.coupling, p.field)
                                : build_schwinger(qubits, p.hopping, p.mass, p.background);
}

inline double reference_energy(const ProblemSpec& p, int qubits) {
  if (p.model == Model::Tfim) return tfim_ground_energy(qubits, p.coupling, p.field);
  return exact_ground_energy(build_hamiltonian(p, qubits));
}

inline Problem build_problem(const RunConfig& cfg, int qubits, int layers) {
  const AnsatzSpec spec{cfg.ansatz, qubits, layers, cfg.bonds, cfg.initial};
  return {build_ansatz(spec), build_hamiltonian(cfg.problem, qubits), reference_energy(cfg.problem, qubits)};
}

inline unsigned worker_count(std::size_t tasks) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv(kWorkersEnv)) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) n = static_cast<unsigned>(v);
  }
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(tasks, 1)));
}

/// Runs the optimizers x sizes x seeds grid on a bounded worker pool. Each
/// run writes only its own slot, so the result does not depend on
/// scheduling.
inline BenchmarkResult run_benchmark(const RunConfig& cfg) {
  validate(cfg);
  BenchmarkResult result;
  std::vector<Problem> problems;
  std::vector<std::size_t> group_problem;
  for (int q : cfg.qubits) {
    for (int l : cfg.layers) {
      problems.push_back(build_problem(cfg, q, l));
      for (const auto& e : cfg.optimizers) {
        Group g{e.label, e.kind, q, l, problems.back().ground_energy, {}};
        std::vector<std::uint64_t> seeds = cfg.seeds;
        std::sort(seeds.begin(), seeds.end());
        for (auto s : seeds) g.runs.push_back({s, {}, false, {}});
        result.groups.push_back(std::move(g));
        group_problem.push_back(problems.size() - 1);
      }
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> tasks;
  for (std::size_t g = 0; g < result.groups.size(); ++g)
    for (std::size_t r = 0; r < result.groups[g].runs.size(); ++r) tasks.emplace_back(g, r);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      const auto [gi, ri] = tasks[t];
      Group& g = result.groups[gi];
      SeedRun& run_slot = g.runs[ri];
      const OptimizerConfig& oc = cfg.optimizers[gi % cfg.optimizers.size()].config;
      try {
        RunResult r = run(g.kind, problems[group_problem[gi]], oc, run_slot.seed);
        run_slot.trace = std::move(r.trace);
        run_slot.failed = r.failed;
        run_slot.failure = std::move(r.failure);
      } catch (const std::exception& ex) {
        run_slot.failed = true;
        run_slot.failure = ex.what();
      }
    }
  };
  const unsigned n = worker_count(tasks.size());
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return result;
}

/// Mean and sample std of the energy error per step over surviving runs.
inline std::vector<AggregateRow> aggregate(const Group& g) {
  std::map<int, std::vector<const RunRecord*>> by_step;
  for (const auto& r : g.runs) {
    if (r.failed) continue;
    for (const auto& rec : r.trace) by_step[rec.step].push_back(&rec);
  }
  std::vector<AggregateRow> out;
  for (const auto& [step, recs] : by_step) {
    AggregateRow a;
    a.step = step;
    a.count = recs.size();
    const double count = static_cast<double>(a.count);
    for (const RunRecord* r : recs) {
      a.mean_energy_error += r->energy_error;
      a.mean_loss += r->loss;
      a.mean_circuits_per_sample += static_cast<double>(r->circuits_per_sample);
      a.mean_circuits_raw += static_cast<double>(r->circuits_raw);
    }
    a.mean_energy_error /= count;
    a.mean_loss /= count;
    a.mean_circuits_per_sample /= count;
    a.mean_circuits_raw /= count;
    if (a.count > 1) {
      double ss = 0.0;
      for (const RunRecord* r : recs) ss += (r->energy_error - a.mean_energy_error) * (r->energy_error - a.mean_energy_error);
      a.std_energy_error = std::sqrt(ss / (count - 1.0));
    }
    out.push_back(a);
  }
  return out;
}

}  // namespace qnstein::bench
