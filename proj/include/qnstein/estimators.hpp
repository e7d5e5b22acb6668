#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qnstein/ansatz.hpp"
#include "qnstein/pauli.hpp"
#include "qnstein/rng.hpp"
#include "qnstein/simulator.hpp"

namespace qnstein {

using Matrix = Eigen::MatrixXd;

/// Callable R^d -> R with a call counter.
template <class F>
class ScalarOracle {
 public:
  explicit ScalarOracle(F fn) : fn_(std::move(fn)) {}

  double operator()(const Params& x) {
    ++calls_;
    return fn_(x);
  }

  std::uint64_t calls() const { return calls_; }

 private:
  F fn_;
  std::uint64_t calls_ = 0;
};

template <class F>
ScalarOracle(F) -> ScalarOracle<F>;

/// Circuit evaluations charged by an estimator call. `raw` counts oracle
/// calls actually made; `per_sample` charges every sample its full
/// evaluation count (a shared base evaluation is charged once per sample).
struct Cost {
  std::uint64_t raw = 0;
  std::uint64_t per_sample = 0;

  Cost& operator+=(const Cost& o) {
    raw += o.raw;
    per_sample += o.per_sample;
    return *this;
  }
  bool operator==(const Cost&) const = default;
};

/// How the Gaussian directions Y of the Stein Hessian estimators are scaled.
///
/// Both variants evaluate f at theta + c Y.
///  - Product: Y ~ N(0, b^2 I); the displacement c Y has standard deviation
///    c b, so the smoothing bias shrinks as O((c b)^2).
///  - Covariance: Y ~ N(0, (b/c)^2 I); the displacement has standard
///    deviation b independent of c.
enum class GaussianScale { Product, Covariance };

struct SmoothingParams {
  double c = 0.05;
  double b = 1.0;
  int samples = 10;
  GaussianScale scale = GaussianScale::Product;

  /// Standard deviation of each coordinate of Y.
  double direction_sd() const { return scale == GaussianScale::Product ? b : b / c; }

  void validate() const {
    if (!(c > 0.0)) throw std::invalid_argument("SmoothingParams: c must be positive");
    if (!(b > 0.0)) throw std::invalid_argument("SmoothingParams: b must be positive");
    if (samples < 1) throw std::invalid_argument("SmoothingParams: need at least one sample");
  }

  bool operator==(const SmoothingParams&) const = default;
};

enum class MetricKind { Stein2, Stein3, Spsa, ParameterShift, Exact };

inline const char* metric_kind_name(MetricKind k) {
  switch (k) {
    case MetricKind::Stein2: return "stein2";
    case MetricKind::Stein3: return "stein3";
    case MetricKind::Spsa: return "spsa";
    case MetricKind::ParameterShift: return "parameter_shift";
    case MetricKind::Exact: return "exact";
  }
  return "?";
}

struct MetricEstimate {
  Matrix matrix;
  MetricKind kind;
  std::optional<SmoothingParams> params;
  Cost cost;
};

inline Matrix symmetrize(const Matrix& m) { return (m + m.transpose()) / 2.0; }

namespace detail {

inline void check_c(double c) {
  if (!(c > 0.0)) throw std::invalid_argument("displacement c must be positive");
}

inline void check_samples(int n) {
  if (n < 1) throw std::invalid_argument("need at least one sample");
}

inline Params gaussian(RandomStream& s, Eigen::Index d, double sd) {
  Params y(d);
  for (Eigen::Index i = 0; i < d; ++i) y[i] = sd * s.normal();
  return y;
}

inline Params rademacher(RandomStream& s, Eigen::Index d) {
  Params y(d);
  for (Eigen::Index i = 0; i < d; ++i) y[i] = s.rademacher();
  return y;
}

/// Per-call batch stream: sample i draws from batch.split(i).
inline RandomStream batch_stream(RandomStream& rng) { return RandomStream(rng.engine()()); }

/// y y^T - var I
inline Matrix stein_weight(const Params& y, double var) {
  Matrix w = y * y.transpose();
  w.diagonal().array() -= var;
  return w;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Gradients

/// Two-point SPSA gradient with Rademacher directions.
template <class F>
Params spsa_gradient(ScalarOracle<F>& f, const Params& theta, double c, int samples, RandomStream& rng) {
  detail::check_c(c);
  detail::check_samples(samples);
  const RandomStream batch = detail::batch_stream(rng);
  Params g = Params::Zero(theta.size());
  for (int i = 0; i < samples; ++i) {
    RandomStream s = batch.split(i);
    const Params delta = detail::rademacher(s, theta.size());
    const double diff = f(theta + c * delta) - f(theta - c * delta);
    g += (diff / (2.0 * c)) * delta;
  }
  return g / samples;
}

/// Two-evaluation Stein gradient of the Gaussian-smoothed function,
/// u ~ N(0, I).
template <class F>
Params stein_gradient_2eval(ScalarOracle<F>& f, const Params& theta, double c, int samples,
                            RandomStream& rng) {
  detail::check_c(c);
  detail::check_samples(samples);
  const RandomStream batch = detail::batch_stream(rng);
  Params g = Params::Zero(theta.size());
  for (int i = 0; i < samples; ++i) {
    RandomStream s = batch.split(i);
    const Params u = detail::gaussian(s, theta.size(), 1.0);
    const double diff = f(theta + c * u) - f(theta - c * u);
    g += (diff / (2.0 * c)) * u;
  }
  return g / samples;
}

/// Single-evaluation Stein gradient. High variance; classical use only.
template <class F>
Params stein_gradient_1eval(ScalarOracle<F>& f, const Params& theta, double c, int samples,
                            RandomStream& rng) {
  detail::check_c(c);
  detail::check_samples(samples);
  const RandomStream batch = detail::batch_stream(rng);
  Params g = Params::Zero(theta.size());
  for (int i = 0; i < samples; ++i) {
    RandomStream s = batch.split(i);
    const Params u = detail::gaussian(s, theta.size(), 1.0);
    g += (f(theta + c * u) / c) * u;
  }
  return g / samples;
}

// ---------------------------------------------------------------------------
// Hessians

/// 2SPSA Hessian: (delta_f / 2c^2) sym(D1 D2^T) with the four-point delta_f.
template <class F>
Matrix spsa2_hessian(ScalarOracle<F>& f, const Params& theta, double c, int samples, RandomStream& rng) {
  detail::check_c(c);
  detail::check_samples(samples);
  const RandomStream batch = detail::batch_stream(rng);
  const Eigen::Index d = theta.size();
  Matrix h = Matrix::Zero(d, d);
  for (int i = 0; i < samples; ++i) {
    RandomStream s = batch.split(i);
    const Params d1 = detail::rademacher(s, d);
    const Params d2 = detail::rademacher(s, d);
    const double df = f(theta + c * d1 + c * d2) - f(theta + c * d1) - f(theta - c * d1 + c * d2) +
                      f(theta - c * d1);
    const Matrix outer = d1 * d2.transpose();
    h += (df / (2.0 * c * c)) * symmetrize(outer);
  }
  return symmetrize(h / samples);
}

/// Single-evaluation Stein Hessian, u ~ N(0, I). Classical use only.
template <class F>
Matrix stein_hessian_1eval(ScalarOracle<F>& f, const Params& theta, double c, int samples,
                           RandomStream& rng) {
  detail::check_c(c);
  detail::check_samples(samples);
  const RandomStream batch = detail::batch_stream(rng);
  const Eigen::Index d = theta.size();
  Matrix h = Matrix::Zero(d, d);
  for (int i = 0; i < samples; ++i) {
    RandomStream s = batch.split(i);
    const Params u = detail::gaussian(s, d, 1.0);
    h += (f(theta + c * u) / (c * c)) * detail::stein_weight(u, 1.0);
  }
  return symmetrize(h / samples);
}

/// Per-sample two-evaluation kernel for a given direction y with
/// coordinate variance var: [f(theta + c y) - f0] (y y^T - var I) / (c^2 var^2).
template <class F>
Matrix stein_hessian_2eval_sample(ScalarOracle<F>& f, const Params& theta, double f0, const Params& y,
                                  double c, double var) {
  const double diff = f(theta + c * y) - f0;
  return (diff / (c * c * var * var)) * detail::stein_weight(y, var);
}

/// Per-sample three-evaluation kernel:
/// [f(theta + c y) + f(theta - c y) - 2 f0] (y y^T - var I) / (2 c^2 var^2).
template <class F>
Matrix stein_hessian_3eval_sample(ScalarOracle<F>& f, const Params& theta, double f0, const Params& y,
                                  double c, double var) {
  const double second = f(theta + c * y) + f(theta - c * y) - 2.0 * f0;
  return (second / (2.0 * c * c * var * var)) * detail::stein_weight(y, var);
}

/// Two-evaluation Stein Hessian with Gaussian directions scaled per
/// `p.scale`. f(theta) is evaluated once per call: N + 1 oracle calls.
template <class F>
Matrix stein_hessian_2eval(ScalarOracle<F>& f, const Params& theta, const SmoothingParams& p,
                           RandomStream& rng) {
  p.validate();
  const RandomStream batch = detail::batch_stream(rng);
  const Eigen::Index d = theta.size();
  const double sd = p.direction_sd();
  const double f0 = f(theta);
  Matrix h = Matrix::Zero(d, d);
  for (int i = 0; i < p.samples; ++i) {
    RandomStream s = batch.split(i);
    h += stein_hessian_2eval_sample(f, theta, f0, detail::gaussian(s, d, sd), p.c, sd * sd);
  }
  return symmetrize(h / p.samples);
}

/// Three-evaluation Stein Hessian; 2N + 1 oracle calls.
template <class F>
Matrix stein_hessian_3eval(ScalarOracle<F>& f, const Params& theta, const SmoothingParams& p,
                           RandomStream& rng) {
  p.validate();
  const RandomStream batch = detail::batch_stream(rng);
  const Eigen::Index d = theta.size();
  const double sd = p.direction_sd();
  const double f0 = f(theta);
  Matrix h = Matrix::Zero(d, d);
  for (int i = 0; i < p.samples; ++i) {
    RandomStream s = batch.split(i);
    h += stein_hessian_3eval_sample(f, theta, f0, detail::gaussian(s, d, sd), p.c, sd * sd);
  }
  return symmetrize(h / p.samples);
}

/// Standard-normal forms (u ~ N(0, I), smoothing scale c).
template <class F>
Matrix stein_hessian_2eval(ScalarOracle<F>& f, const Params& theta, double c, int samples,
                           RandomStream& rng) {
  return stein_hessian_2eval(f, theta, SmoothingParams{c, 1.0, samples, GaussianScale::Product}, rng);
}

template <class F>
Matrix stein_hessian_3eval(ScalarOracle<F>& f, const Params& theta, double c, int samples,
                           RandomStream& rng) {
  return stein_hessian_3eval(f, theta, SmoothingParams{c, 1.0, samples, GaussianScale::Product}, rng);
}

// ---------------------------------------------------------------------------
// Metric tensors from a fidelity oracle.
//
// `fid(x)` returns |<psi(theta)|psi(x)>|^2 for the fixed base point theta;
// the metric is -1/2 times the Hessian of fid at x = theta.

template <class F>
MetricEstimate stein_metric_2eval(ScalarOracle<F>& fid, const Params& theta, const SmoothingParams& p,
                                  RandomStream& rng) {
  const std::uint64_t before = fid.calls();
  Matrix m = -0.5 * stein_hessian_2eval(fid, theta, p, rng);
  const auto n = static_cast<std::uint64_t>(p.samples);
  return {symmetrize(m), MetricKind::Stein2, p, Cost{fid.calls() - before, 2 * n}};
}

template <class F>
MetricEstimate stein_metric_3eval(ScalarOracle<F>& fid, const Params& theta, const SmoothingParams& p,
                                  RandomStream& rng) {
  const std::uint64_t before = fid.calls();
  Matrix m = -0.5 * stein_hessian_3eval(fid, theta, p, rng);
  const auto n = static_cast<std::uint64_t>(p.samples);
  return {symmetrize(m), MetricKind::Stein3, p, Cost{fid.calls() - before, 3 * n}};
}

/// -1/2 of the 2SPSA Hessian of the fidelity; 4N overlap evaluations.
template <class F>
MetricEstimate spsa_metric(ScalarOracle<F>& fid, const Params& theta, double c, int samples,
                           RandomStream& rng) {
  const std::uint64_t before = fid.calls();
  Matrix m = -0.5 * spsa2_hessian(fid, theta, c, samples, rng);
  const std::uint64_t used = fid.calls() - before;
  return {symmetrize(m), MetricKind::Spsa, SmoothingParams{c, 1.0, samples}, Cost{used, used}};
}

namespace detail {
inline void require_single_use(const Circuit& c, const char* who) {
  if (!c.single_use_parameters())
    throw std::invalid_argument(std::string(who) + ": every parameter must drive exactly one rotation");
}
}  // namespace detail

/// Four-term shift rule for every pair j1 <= j2:
/// F = -1/8 [F(++) - F(+-) - F(-+) + F(--)] with shifts of pi/2.
/// 4 d (d + 1) / 2 overlap evaluations.
inline MetricEstimate parameter_shift_metric(const Circuit& c, const Params& theta,
                                             std::optional<std::uint64_t> shots, RandomStream& rng) {
  detail::check_params(c, theta);
  detail::require_single_use(c, "parameter_shift_metric");
  const Eigen::Index d = theta.size();
  const double shift = M_PI / 2;
  Matrix m(d, d);
  std::uint64_t evals = 0;
  auto overlap = [&](const Params& x) {
    ++evals;
    return fidelity(c, theta, x, shots, rng);
  };
  for (Eigen::Index j1 = 0; j1 < d; ++j1) {
    for (Eigen::Index j2 = j1; j2 < d; ++j2) {
      Params e = Params::Zero(d), f = Params::Zero(d);
      e[j1] = shift;
      f[j2] = shift;
      const double value = overlap(theta + e + f) - overlap(theta + e - f) - overlap(theta - e + f) +
                           overlap(theta - e - f);
      m(j1, j2) = m(j2, j1) = -value / 8.0;
    }
  }
  return {m, MetricKind::ParameterShift, std::nullopt, Cost{evals, evals}};
}

/// d|psi>/d theta_j: sum over rotations driven by j of the circuit with
/// -i A / 2 inserted after that rotation.
inline std::vector<Statevector> state_derivatives(const Circuit& c, const Params& theta) {
  detail::check_params(c, theta);
  const auto& gates = c.gates();
  const int n = c.qubit_count();
  std::vector<Statevector> deriv;
  deriv.reserve(c.param_count());
  for (int j = 0; j < c.param_count(); ++j) {
    std::vector<Complex> zero(std::size_t{1} << n, Complex{0, 0});
    deriv.emplace_back(n, std::move(zero));
  }
  Statevector prefix(n);
  for (std::size_t k = 0; k < gates.size(); ++k) {
    const Gate& g = gates[k];
    prefix.apply(g, detail::angle_of(g, theta));
    if (!is_rotation(g.kind)) continue;
    Statevector branch = prefix;
    branch.apply_generator(g);
    for (std::size_t r = k + 1; r < gates.size(); ++r) branch.apply(gates[r], detail::angle_of(gates[r], theta));
    auto& acc = deriv[g.param_index].amplitudes();
    const auto& add = branch.amplitudes();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += add[i];
  }
  return deriv;
}

/// Fubini-Study metric Re[<d_i psi|d_j psi> - <d_i psi|psi><psi|d_j psi>]
/// from exact derivative states.
inline MetricEstimate exact_metric(const Circuit& c, const Params& theta) {
  const Statevector psi = apply_circuit(c, theta);
  const auto dpsi = state_derivatives(c, theta);
  const Eigen::Index d = theta.size();
  std::vector<Complex> berry(d);
  for (Eigen::Index i = 0; i < d; ++i) berry[i] = dpsi[i].inner(psi);
  Matrix m(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i; j < d; ++j)
      m(i, j) = m(j, i) = (dpsi[i].inner(dpsi[j]) - berry[i] * std::conj(berry[j])).real();
  return {m, MetricKind::Exact, std::nullopt, Cost{}};
}

/// Exact loss gradient by the +-pi/2 two-point shift rule; 2d evaluations.
inline Params parameter_shift_gradient(const Circuit& c, const PauliSum& h, const Params& theta) {
  detail::check_params(c, theta);
  detail::require_single_use(c, "parameter_shift_gradient");
  Params g(theta.size());
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    Params plus = theta, minus = theta;
    plus[j] += M_PI / 2;
    minus[j] -= M_PI / 2;
    g[j] = 0.5 * (loss(c, h, plus) - loss(c, h, minus));
  }
  return g;
}

}  // namespace qnstein
