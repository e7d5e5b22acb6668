#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qnstein/pauli.hpp"
#include "qnstein/rng.hpp"
#include "qnstein/simulator.hpp"

namespace qnstein {

enum class AnsatzKind { HardwareEfficient, SchwingerSO4 };

/// Bond ordering inside one SO(4) layer.
enum class BondPattern {
  BrickWall,   // (0,1),(2,3),... then (1,2),(3,4),...
  Sequential,  // (0,1),(1,2),(2,3),...
};

enum class InitialState {
  Zero,       // |00...0>
  Staggered,  // X on odd sites, |0101...>
};

struct AnsatzSpec {
  AnsatzKind kind = AnsatzKind::HardwareEfficient;
  int qubits = 2;
  int layers = 1;
  BondPattern bonds = BondPattern::BrickWall;
  InitialState initial = InitialState::Staggered;

  bool operator==(const AnsatzSpec&) const = default;
};

/// L layers of (RY on every qubit, then CNOT chain i -> i+1). d = n L.
inline Circuit hardware_efficient(int n, int layers) {
  if (n < 2) throw std::invalid_argument("hardware_efficient: need at least 2 qubits");
  if (layers < 1) throw std::invalid_argument("hardware_efficient: need at least 1 layer");
  std::vector<Gate> gates;
  int p = 0;
  for (int l = 0; l < layers; ++l) {
    for (int q = 0; q < n; ++q) gates.push_back(Gate::ry(q, p++));
    for (int q = 0; q + 1 < n; ++q) gates.push_back(Gate::cnot(q, q + 1));
  }
  return Circuit(n, p, std::move(gates));
}

/// One RY on a single qubit; the smallest circuit with a nontrivial metric.
inline Circuit single_qubit_ry() { return Circuit(1, 1, {Gate::ry(0, 0)}); }

inline constexpr int kSo4Params = 6;

/// Appends an SO(4) block on sites (a, b) using params first..first+5.
///
/// Realized as M^dagger (Rz Rx Rz (x) Rz Rx Rz) M with the magic-basis change
/// M = CNOT(b -> a) H_b (S (x) S). The block's matrix is real orthogonal.
inline void append_so4(std::vector<Gate>& gates, int a, int b, int first) {
  gates.push_back(Gate::s(a));
  gates.push_back(Gate::s(b));
  gates.push_back(Gate::h(b));
  gates.push_back(Gate::cnot(b, a));
  gates.push_back(Gate::rz(a, first + 0));
  gates.push_back(Gate::rx(a, first + 1));
  gates.push_back(Gate::rz(a, first + 2));
  gates.push_back(Gate::rz(b, first + 3));
  gates.push_back(Gate::rx(b, first + 4));
  gates.push_back(Gate::rz(b, first + 5));
  gates.push_back(Gate::cnot(b, a));
  gates.push_back(Gate::h(b));
  gates.push_back(Gate::sdg(b));
  gates.push_back(Gate::sdg(a));
}

/// Two-qubit circuit holding a single SO(4) block.
inline Circuit so4_circuit() {
  std::vector<Gate> gates;
  append_so4(gates, 0, 1, 0);
  return Circuit(2, kSo4Params, std::move(gates));
}

/// Unitary of a circuit, built column by column. Small circuits only.
inline Eigen::MatrixXcd circuit_unitary(const Circuit& c, const Params& theta) {
  const std::size_t dim = std::size_t{1} << c.qubit_count();
  Eigen::MatrixXcd u(dim, dim);
  for (std::size_t col = 0; col < dim; ++col) {
    std::vector<Complex> amps(dim, Complex{0, 0});
    amps[col] = 1.0;
    Statevector s(c.qubit_count(), std::move(amps));
    apply_circuit_inplace(c, theta, s);
    for (std::size_t row = 0; row < dim; ++row) u(row, col) = s[row];
  }
  return u;
}

/// 4x4 matrix of the SO(4) block for the given six angles.
inline Eigen::Matrix4cd so4_gate(const Params& alpha) {
  if (alpha.size() != kSo4Params) throw std::invalid_argument("so4_gate: expected 6 parameters");
  return circuit_unitary(so4_circuit(), alpha);
}

inline std::vector<std::pair<int, int>> so4_bonds(int n, BondPattern pattern) {
  std::vector<std::pair<int, int>> bonds;
  if (pattern == BondPattern::BrickWall) {
    for (int q = 0; q + 1 < n; q += 2) bonds.emplace_back(q, q + 1);
    for (int q = 1; q + 1 < n; q += 2) bonds.emplace_back(q, q + 1);
  } else {
    for (int q = 0; q + 1 < n; ++q) bonds.emplace_back(q, q + 1);
  }
  return bonds;
}

/// Initial-state preparation followed by L layers of SO(4) blocks.
/// d = 6 * (bonds per layer) * L.
inline Circuit schwinger_ansatz(int n, int layers, BondPattern pattern = BondPattern::BrickWall,
                                InitialState initial = InitialState::Staggered) {
  if (n < 2) throw std::invalid_argument("schwinger_ansatz: need at least 2 qubits");
  if (n % 2 != 0) throw std::invalid_argument("schwinger_ansatz: qubit count must be even");
  if (layers < 1) throw std::invalid_argument("schwinger_ansatz: need at least 1 layer");
  std::vector<Gate> gates;
  if (initial == InitialState::Staggered)
    for (int q = 1; q < n; q += 2) gates.push_back(Gate::x(q));
  const auto bonds = so4_bonds(n, pattern);
  int p = 0;
  for (int l = 0; l < layers; ++l) {
    for (auto [a, b] : bonds) {
      append_so4(gates, a, b, p);
      p += kSo4Params;
    }
  }
  return Circuit(n, p, std::move(gates));
}

inline Circuit build_ansatz(const AnsatzSpec& spec) {
  switch (spec.kind) {
    case AnsatzKind::HardwareEfficient: return hardware_efficient(spec.qubits, spec.layers);
    case AnsatzKind::SchwingerSO4:
      return schwinger_ansatz(spec.qubits, spec.layers, spec.bonds, spec.initial);
  }
  throw std::logic_error("build_ansatz: unknown kind");
}

/// Compute-uncompute overlap |<psi(displaced)|psi(base)>|^2, read as the
/// all-zeros probability of U^dagger(displaced) U(base)|0>. With `shots`,
/// the probability is estimated from that many samples.
inline double fidelity(const Circuit& c, const Params& base, const Params& displaced,
                       std::optional<std::uint64_t> shots, RandomStream& rng) {
  detail::check_params(c, displaced);
  Statevector s = apply_adjoint_circuit(c, displaced, apply_circuit(c, base));
  return shots ? sampled_zero_probability(s, *shots, rng) : zero_probability(s);
}

inline double fidelity(const Circuit& c, const Params& base, const Params& displaced) {
  RandomStream unused;
  return fidelity(c, base, displaced, std::nullopt, unused);
}

/// <0|U^dagger H U|0>, exact or shot-sampled.
inline double loss(const Circuit& c, const PauliSum& h, const Params& theta,
                   std::optional<std::uint64_t> shots, RandomStream& rng) {
  if (c.qubit_count() != h.qubit_count()) throw std::invalid_argument("loss: qubit count mismatch");
  const Statevector s = apply_circuit(c, theta);
  return shots ? sampled_expectation(s, h, *shots, rng) : expectation(s, h);
}

inline double loss(const Circuit& c, const PauliSum& h, const Params& theta) {
  RandomStream unused;
  return loss(c, h, theta, std::nullopt, unused);
}

}  // namespace qnstein
