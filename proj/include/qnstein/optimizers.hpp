#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qnstein/ansatz.hpp"
#include "qnstein/estimators.hpp"
#include "qnstein/pauli.hpp"
#include "qnstein/rng.hpp"
#include "qnstein/simulator.hpp"

namespace qnstein {

enum class OptimizerKind { GD, QNG, SPSA, QNSPSA, STEIN, QNSTEIN2, QNSTEIN3 };

inline constexpr OptimizerKind kAllOptimizers[] = {
    OptimizerKind::GD,     OptimizerKind::QNG,      OptimizerKind::SPSA,    OptimizerKind::QNSPSA,
    OptimizerKind::STEIN,  OptimizerKind::QNSTEIN2, OptimizerKind::QNSTEIN3};

inline const char* optimizer_name(OptimizerKind k) {
  switch (k) {
    case OptimizerKind::GD: return "GD";
    case OptimizerKind::QNG: return "QNG";
    case OptimizerKind::SPSA: return "SPSA";
    case OptimizerKind::QNSPSA: return "QNSPSA";
    case OptimizerKind::STEIN: return "STEIN";
    case OptimizerKind::QNSTEIN2: return "QNSTEIN2";
    case OptimizerKind::QNSTEIN3: return "QNSTEIN3";
  }
  return "?";
}

inline std::optional<OptimizerKind> parse_optimizer(const std::string& s) {
  for (OptimizerKind k : kAllOptimizers)
    if (s == optimizer_name(k)) return k;
  return std::nullopt;
}

/// Natural-gradient kinds precondition with a metric estimate.
inline bool uses_metric(OptimizerKind k) {
  return k == OptimizerKind::QNG || k == OptimizerKind::QNSPSA || k == OptimizerKind::QNSTEIN2 ||
         k == OptimizerKind::QNSTEIN3;
}

struct OptimizerConfig {
  double learning_rate = 0.01;
  double c = 0.05;
  double b = 2.0;
  int samples = 10;
  double regularization = 0.01;
  std::optional<std::uint64_t> shots;
  int max_steps = 300;
  bool blocking = false;
  double blocking_tolerance_multiplier = 2.0;
  /// Fold the metric estimate of a blocked step into the running average.
  bool average_on_blocked = true;
  GaussianScale gaussian_scale = GaussianScale::Product;

  SmoothingParams smoothing() const { return {c, b, samples, gaussian_scale}; }

  void validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
    if (!(regularization >= 0.0)) throw std::invalid_argument("regularization must be non-negative");
    if (samples < 1) throw std::invalid_argument("samples must be at least 1");
    if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
    if (!(b > 0.0)) throw std::invalid_argument("b must be positive");
    if (shots && *shots == 0) throw std::invalid_argument("shots must be positive when set");
    if (max_steps < 0) throw std::invalid_argument("max_steps must be non-negative");
    if (!(blocking_tolerance_multiplier >= 0.0))
      throw std::invalid_argument("blocking_tolerance_multiplier must be non-negative");
  }

  bool operator==(const OptimizerConfig&) const = default;
};

/// Circuit + Hamiltonian + reference ground energy.
struct Problem {
  Circuit circuit;
  PauliSum hamiltonian;
  double ground_energy;
};

struct Counters {
  Cost loss;
  Cost overlap;

  Cost total() const {
    Cost t = loss;
    t += overlap;
    return t;
  }
  bool operator==(const Counters&) const = default;
};

struct RunRecord {
  int step = 0;
  double loss = 0.0;
  double energy = 0.0;
  double energy_error = 0.0;
  std::uint64_t circuits_per_sample = 0;
  std::uint64_t circuits_raw = 0;
  bool blocked = false;
  double wall_seconds = 0.0;
};

/// Independent streams of one run, all split from the run seed.
struct RunStreams {
  RandomStream init, estimator, shots, monitor;

  explicit RunStreams(std::uint64_t seed) {
    const RandomStream root(seed);
    init = root.split(0);
    estimator = root.split(1);
    shots = root.split(2);
    monitor = root.split(3);
  }
};

struct OptimizerState {
  Params theta;
  std::optional<Matrix> metric_average;
  int k = 0;
  Counters counters;
  /// Noisy loss at theta, cached for blocking comparisons.
  std::optional<double> current_loss;
  std::vector<RunRecord> trace;
  RunStreams streams;
  bool failed = false;
  std::string failure;
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();
};

// ---------------------------------------------------------------------------

/// (sqrt(F^T F) + beta I) / (1 + beta); for symmetric F, sqrt(F^T F) = V|L|V^T.
inline Matrix regularize_metric(const Matrix& f, double beta) {
  if (f.rows() != f.cols()) throw std::invalid_argument("regularize_metric: matrix must be square");
  if (!(beta >= 0.0)) throw std::invalid_argument("regularize_metric: beta must be non-negative");
  if ((f - f.transpose()).cwiseAbs().maxCoeff() >= 1e-10)
    throw std::invalid_argument("regularize_metric: matrix must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(f);
  if (solver.info() != Eigen::Success) throw std::runtime_error("regularize_metric: eigensolver failed");
  const auto& v = solver.eigenvectors();
  Matrix r = v * solver.eigenvalues().cwiseAbs().asDiagonal() * v.transpose();
  r.diagonal().array() += beta;
  return symmetrize(r / (1.0 + beta));
}

/// k/(k+1) previous + 1/(k+1) estimate; the estimate itself at k = 0.
inline Matrix average_metric(const std::optional<Matrix>& previous, const Matrix& estimate, int k) {
  if (k < 0) throw std::invalid_argument("average_metric: negative step index");
  if (k == 0 || !previous) return estimate;
  if (previous->rows() != estimate.rows() || previous->cols() != estimate.cols())
    throw std::invalid_argument("average_metric: dimension mismatch");
  const double w = static_cast<double>(k) / (k + 1);
  return symmetrize(w * *previous + (1.0 - w) * estimate);
}

/// theta - eta x with F x = g solved by Cholesky.
inline Params natural_step(const Params& theta, const Params& gradient, const Matrix& metric, double eta) {
  if (metric.rows() != gradient.size() || theta.size() != gradient.size())
    throw std::invalid_argument("natural_step: dimension mismatch");
  Eigen::LLT<Matrix> llt(metric);
  if (llt.info() != Eigen::Success) throw std::runtime_error("natural_step: metric is not positive definite");
  return theta - eta * llt.solve(gradient);
}

inline bool blocking_check(double candidate, double current, double tolerance) {
  return candidate <= current + tolerance;
}

/// Blocking tolerance: multiplier * sqrt(sum c^2) / sqrt(shots); +inf in
/// exact mode.
inline double blocking_tolerance(const PauliSum& h, const OptimizerConfig& cfg) {
  if (!cfg.shots) return std::numeric_limits<double>::infinity();
  return cfg.blocking_tolerance_multiplier * noise_weight(h) / std::sqrt(static_cast<double>(*cfg.shots));
}

// ---------------------------------------------------------------------------

namespace detail {

inline void record(OptimizerState& st, const Problem& pb, const OptimizerConfig& cfg, bool blocked) {
  RunRecord r;
  r.step = st.k;
  const Statevector psi = apply_circuit(pb.circuit, st.theta);
  r.energy = expectation(psi, pb.hamiltonian);
  r.loss = cfg.shots ? sampled_expectation(psi, pb.hamiltonian, *cfg.shots, st.streams.monitor) : r.energy;
  r.energy_error = r.energy - pb.ground_energy;
  const Cost total = st.counters.total();
  r.circuits_per_sample = total.per_sample;
  r.circuits_raw = total.raw;
  r.blocked = blocked;
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - st.started).count();
  st.trace.push_back(r);
}

}  // namespace detail

/// Fresh state at theta_0 ~ Uniform(-pi, pi)^d with the initial trace row.
inline OptimizerState initial_state(const Problem& pb, const OptimizerConfig& cfg, std::uint64_t seed) {
  OptimizerState st{Params(pb.circuit.param_count()), std::nullopt, 0, {}, std::nullopt, {}, RunStreams(seed)};
  for (Eigen::Index i = 0; i < st.theta.size(); ++i) st.theta[i] = st.streams.init.uniform(-M_PI, M_PI);
  detail::record(st, pb, cfg, false);
  return st;
}

/// One optimizer iteration: gradient, optional metric (averaged and
/// regularized), update, optional blocking, trace row.
inline void step(OptimizerKind kind, OptimizerState& st, const Problem& pb, const OptimizerConfig& cfg) {
  if (st.failed) return;
  const Circuit& circ = pb.circuit;
  const PauliSum& ham = pb.hamiltonian;
  const auto d = static_cast<std::uint64_t>(circ.param_count());
  const auto n = static_cast<std::uint64_t>(cfg.samples);

  ScalarOracle loss_oracle(
      [&](const Params& x) { return loss(circ, ham, x, cfg.shots, st.streams.shots); });
  const Params base = st.theta;
  ScalarOracle fid_oracle(
      [&](const Params& x) { return fidelity(circ, base, x, cfg.shots, st.streams.shots); });

  Params grad;
  switch (kind) {
    case OptimizerKind::GD:
    case OptimizerKind::QNG:
      grad = parameter_shift_gradient(circ, ham, st.theta);
      st.counters.loss += Cost{2 * d, 2 * d};
      break;
    case OptimizerKind::SPSA:
    case OptimizerKind::QNSPSA:
      grad = spsa_gradient(loss_oracle, st.theta, cfg.c, cfg.samples, st.streams.estimator);
      st.counters.loss += Cost{loss_oracle.calls(), 2 * n};
      break;
    case OptimizerKind::STEIN:
    case OptimizerKind::QNSTEIN2:
    case OptimizerKind::QNSTEIN3:
      grad = stein_gradient_2eval(loss_oracle, st.theta, cfg.c, cfg.samples, st.streams.estimator);
      st.counters.loss += Cost{loss_oracle.calls(), 2 * n};
      break;
  }

  Params candidate;
  const std::optional<Matrix> previous_average = st.metric_average;
  if (uses_metric(kind)) {
    MetricEstimate est = [&]() -> MetricEstimate {
      switch (kind) {
        case OptimizerKind::QNG: {
          MetricEstimate e = exact_metric(circ, st.theta);
          e.cost = Cost{2 * d * (d + 1), 2 * d * (d + 1)};
          return e;
        }
        case OptimizerKind::QNSPSA: return spsa_metric(fid_oracle, st.theta, cfg.c, cfg.samples, st.streams.estimator);
        case OptimizerKind::QNSTEIN2: return stein_metric_2eval(fid_oracle, st.theta, cfg.smoothing(), st.streams.estimator);
        default: return stein_metric_3eval(fid_oracle, st.theta, cfg.smoothing(), st.streams.estimator);
      }
    }();
    st.counters.overlap += est.cost;
    st.metric_average = average_metric(st.metric_average, est.matrix, st.k);
    candidate = natural_step(st.theta, grad, regularize_metric(*st.metric_average, cfg.regularization),
                             cfg.learning_rate);
  } else {
    candidate = st.theta - cfg.learning_rate * grad;
  }

  if (!candidate.allFinite()) {
    st.failed = true;
    st.failure = "non-finite parameters at step " + std::to_string(st.k + 1);
    return;
  }

  bool blocked = false;
  const double tol = blocking_tolerance(ham, cfg);
  if (cfg.blocking && std::isfinite(tol)) {
    if (!st.current_loss) {
      st.current_loss = loss_oracle(st.theta);
      st.counters.loss += Cost{1, 1};
    }
    const double cand_loss = loss_oracle(candidate);
    st.counters.loss += Cost{1, 1};
    if (!std::isfinite(cand_loss)) {
      st.failed = true;
      st.failure = "non-finite loss at step " + std::to_string(st.k + 1);
      return;
    }
    blocked = !blocking_check(cand_loss, *st.current_loss, tol);
    if (!blocked) st.current_loss = cand_loss;
  }

  if (blocked) {
    if (!cfg.average_on_blocked) st.metric_average = previous_average;
  } else {
    st.theta = candidate;
  }
  ++st.k;
  detail::record(st, pb, cfg, blocked);
  if (!std::isfinite(st.trace.back().energy)) {
    st.failed = true;
    st.failure = "non-finite energy at step " + std::to_string(st.k);
  }
}

struct RunResult {
  std::vector<RunRecord> trace;
  bool failed = false;
  std::string failure;
};

inline RunResult run(OptimizerKind kind, const Problem& pb, const OptimizerConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  OptimizerState st = initial_state(pb, cfg, seed);
  for (int s = 0; s < cfg.max_steps && !st.failed; ++s) step(kind, st, pb, cfg);
  return {std::move(st.trace), st.failed, st.failure};
}

}  // namespace qnstein
