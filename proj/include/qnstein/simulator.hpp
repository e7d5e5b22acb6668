#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qnstein/pauli.hpp"
#include "qnstein/rng.hpp"

namespace qnstein {

using Params = Eigen::VectorXd;
using Complex = std::complex<double>;

inline constexpr int kMaxSimulatorQubits = 20;

enum class GateKind : std::uint8_t { RX, RY, RZ, H, S, Sdg, X, CNOT };

inline bool is_rotation(GateKind k) {
  return k == GateKind::RX || k == GateKind::RY || k == GateKind::RZ;
}

inline const char* gate_name(GateKind k) {
  switch (k) {
    case GateKind::RX: return "RX";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::H: return "H";
    case GateKind::S: return "S";
    case GateKind::Sdg: return "Sdg";
    case GateKind::X: return "X";
    case GateKind::CNOT: return "CNOT";
  }
  return "?";
}

/// Rotations follow R_A(t) = exp(-i t A / 2). For CNOT, `site` is the
/// control and `target` the target.
struct Gate {
  GateKind kind;
  int site = 0;
  int target = -1;
  int param_index = -1;

  static Gate rx(int q, int p) { return {GateKind::RX, q, -1, p}; }
  static Gate ry(int q, int p) { return {GateKind::RY, q, -1, p}; }
  static Gate rz(int q, int p) { return {GateKind::RZ, q, -1, p}; }
  static Gate h(int q) { return {GateKind::H, q}; }
  static Gate s(int q) { return {GateKind::S, q}; }
  static Gate sdg(int q) { return {GateKind::Sdg, q}; }
  static Gate x(int q) { return {GateKind::X, q}; }
  static Gate cnot(int control, int target) { return {GateKind::CNOT, control, target}; }

  bool operator==(const Gate&) const = default;
};

/// 2x2 matrix of a single-qubit gate; `angle` is ignored for fixed gates.
inline Eigen::Matrix2cd gate_matrix(GateKind kind, double angle = 0.0) {
  const double c = std::cos(angle / 2), s = std::sin(angle / 2);
  const Complex i{0, 1};
  Eigen::Matrix2cd m;
  switch (kind) {
    case GateKind::RX: m << c, -i * s, -i * s, c; break;
    case GateKind::RY: m << c, -s, s, c; break;
    case GateKind::RZ: m << std::exp(-i * (angle / 2)), 0, 0, std::exp(i * (angle / 2)); break;
    case GateKind::H: m << M_SQRT1_2, M_SQRT1_2, M_SQRT1_2, -M_SQRT1_2; break;
    case GateKind::S: m << 1, 0, 0, i; break;
    case GateKind::Sdg: m << 1, 0, 0, -i; break;
    case GateKind::X: m << 0, 1, 1, 0; break;
    case GateKind::CNOT: throw std::invalid_argument("gate_matrix: CNOT is a two-qubit gate");
  }
  return m;
}

/// Ordered gate list acting on |0...0>.
class Circuit {
 public:
  Circuit(int qubit_count, int param_count, std::vector<Gate> gates)
      : qubit_count_(qubit_count), param_count_(param_count), gates_(std::move(gates)) {
    if (qubit_count < 1 || qubit_count > kMaxSimulatorQubits)
      throw std::invalid_argument("Circuit: qubit_count must be in [1, 20]");
    if (param_count < 0) throw std::invalid_argument("Circuit: negative param_count");
    std::vector<int> uses(param_count, 0);
    for (const Gate& g : gates_) {
      if (g.site < 0 || g.site >= qubit_count) throw std::out_of_range("Circuit: gate site out of range");
      if (g.kind == GateKind::CNOT) {
        if (g.target < 0 || g.target >= qubit_count) throw std::out_of_range("Circuit: CNOT target out of range");
        if (g.target == g.site) throw std::invalid_argument("Circuit: CNOT needs two distinct sites");
      }
      if (is_rotation(g.kind)) {
        if (g.param_index < 0 || g.param_index >= param_count)
          throw std::out_of_range("Circuit: rotation param_index out of range");
        ++uses[g.param_index];
      } else if (g.param_index != -1) {
        throw std::invalid_argument("Circuit: fixed gate carries a parameter index");
      }
    }
    for (int p = 0; p < param_count; ++p)
      if (uses[p] == 0) throw std::invalid_argument("Circuit: parameter " + std::to_string(p) + " is never used");
  }

  int qubit_count() const { return qubit_count_; }
  int param_count() const { return param_count_; }
  const std::vector<Gate>& gates() const { return gates_; }

  /// True if every parameter drives exactly one rotation (the condition for
  /// two-term parameter-shift rules).
  bool single_use_parameters() const {
    std::vector<int> uses(param_count_, 0);
    for (const Gate& g : gates_)
      if (is_rotation(g.kind)) ++uses[g.param_index];
    for (int u : uses)
      if (u != 1) return false;
    return true;
  }

  bool operator==(const Circuit&) const = default;

 private:
  int qubit_count_;
  int param_count_;
  std::vector<Gate> gates_;
};

class Statevector {
 public:
  explicit Statevector(int qubit_count) : qubit_count_(qubit_count) {
    if (qubit_count < 1 || qubit_count > kMaxSimulatorQubits)
      throw std::invalid_argument("Statevector: qubit_count must be in [1, 20]");
    amplitudes_.assign(std::size_t{1} << qubit_count, Complex{0, 0});
    amplitudes_[0] = 1.0;
  }

  Statevector(int qubit_count, std::vector<Complex> amplitudes)
      : qubit_count_(qubit_count), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != (std::size_t{1} << qubit_count))
      throw std::invalid_argument("Statevector: amplitude count must be 2^n");
  }

  int qubit_count() const { return qubit_count_; }
  std::size_t dimension() const { return amplitudes_.size(); }
  const std::vector<Complex>& amplitudes() const { return amplitudes_; }
  std::vector<Complex>& amplitudes() { return amplitudes_; }
  Complex operator[](std::size_t i) const { return amplitudes_[i]; }

  double norm_squared() const {
    double s = 0.0;
    for (const Complex& a : amplitudes_) s += std::norm(a);
    return s;
  }

  Complex inner(const Statevector& other) const {
    Complex s{0, 0};
    for (std::size_t i = 0; i < amplitudes_.size(); ++i) s += std::conj(amplitudes_[i]) * other.amplitudes_[i];
    return s;
  }

  void apply_single(int q, const Eigen::Matrix2cd& m) {
    const std::uint64_t bit = site_bit(qubit_count_, q);
    const std::size_t dim = amplitudes_.size();
    for (std::size_t i = 0; i < dim; ++i) {
      if (i & bit) continue;
      const Complex a0 = amplitudes_[i], a1 = amplitudes_[i | bit];
      amplitudes_[i] = m(0, 0) * a0 + m(0, 1) * a1;
      amplitudes_[i | bit] = m(1, 0) * a0 + m(1, 1) * a1;
    }
  }

  void apply_cnot(int control, int target) {
    const std::uint64_t cbit = site_bit(qubit_count_, control), tbit = site_bit(qubit_count_, target);
    const std::size_t dim = amplitudes_.size();
    for (std::size_t i = 0; i < dim; ++i)
      if ((i & cbit) && !(i & tbit)) std::swap(amplitudes_[i], amplitudes_[i | tbit]);
  }

  void apply(const Gate& g, double angle = 0.0) {
    if (g.kind == GateKind::CNOT)
      apply_cnot(g.site, g.target);
    else
      apply_single(g.site, gate_matrix(g.kind, angle));
  }

  void apply_inverse(const Gate& g, double angle = 0.0) {
    switch (g.kind) {
      case GateKind::CNOT: apply_cnot(g.site, g.target); break;
      case GateKind::S: apply_single(g.site, gate_matrix(GateKind::Sdg)); break;
      case GateKind::Sdg: apply_single(g.site, gate_matrix(GateKind::S)); break;
      case GateKind::RX:
      case GateKind::RY:
      case GateKind::RZ: apply_single(g.site, gate_matrix(g.kind, -angle)); break;
      case GateKind::H:
      case GateKind::X: apply_single(g.site, gate_matrix(g.kind)); break;
    }
  }

  /// Multiplies by -i A / 2, the derivative generator of rotation `g`.
  void apply_generator(const Gate& g) {
    if (!is_rotation(g.kind)) throw std::invalid_argument("apply_generator: not a rotation");
    const Complex mi{0, -0.5};
    Eigen::Matrix2cd a;
    switch (g.kind) {
      case GateKind::RX: a << 0, 1, 1, 0; break;
      case GateKind::RY: a << 0, Complex(0, -1), Complex(0, 1), 0; break;
      default: a << 1, 0, 0, -1; break;
    }
    apply_single(g.site, mi * a);
  }

 private:
  int qubit_count_;
  std::vector<Complex> amplitudes_;
};

namespace detail {
inline void check_params(const Circuit& c, const Params& theta) {
  if (theta.size() != c.param_count())
    throw std::invalid_argument("parameter vector length " + std::to_string(theta.size()) +
                                " does not match circuit param_count " + std::to_string(c.param_count()));
}
inline double angle_of(const Gate& g, const Params& theta) {
  return is_rotation(g.kind) ? theta[g.param_index] : 0.0;
}
}  // namespace detail

inline void apply_circuit_inplace(const Circuit& c, const Params& theta, Statevector& s) {
  detail::check_params(c, theta);
  if (s.qubit_count() != c.qubit_count()) throw std::invalid_argument("apply_circuit: qubit count mismatch");
  for (const Gate& g : c.gates()) s.apply(g, detail::angle_of(g, theta));
}

/// U(theta)|0...0>.
inline Statevector apply_circuit(const Circuit& c, const Params& theta) {
  Statevector s(c.qubit_count());
  apply_circuit_inplace(c, theta, s);
  return s;
}

/// U(theta)^dagger s.
inline Statevector apply_adjoint_circuit(const Circuit& c, const Params& theta, Statevector s) {
  detail::check_params(c, theta);
  if (s.qubit_count() != c.qubit_count()) throw std::invalid_argument("apply_adjoint_circuit: qubit count mismatch");
  const auto& gates = c.gates();
  for (auto it = gates.rbegin(); it != gates.rend(); ++it) s.apply_inverse(*it, detail::angle_of(*it, theta));
  return s;
}

/// <s|P|s> for a unit-coefficient Pauli pattern.
inline double pauli_expectation(const Statevector& s, const PauliMasks& m) {
  const auto& a = s.amplitudes();
  Complex acc{0, 0};
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i ^ m.flip]) * m.sign(i) * a[i];
  return acc.real();
}

inline double expectation(const Statevector& s, const PauliSum& h) {
  if (s.qubit_count() != h.qubit_count()) throw std::invalid_argument("expectation: qubit count mismatch");
  double e = 0.0;
  for (const auto& t : h.terms())
    e += t.is_identity() ? t.coefficient : t.coefficient * pauli_expectation(s, t.masks());
  return e;
}

/// Each non-identity term is measured in its eigenbasis with the full shot
/// budget; the number of +1 outcomes is Binomial(shots, (1 + <P>)/2).
inline double sampled_expectation(const Statevector& s, const PauliSum& h, std::uint64_t shots,
                                  RandomStream& rng) {
  if (shots == 0) throw std::invalid_argument("sampled_expectation: shots must be positive");
  if (s.qubit_count() != h.qubit_count()) throw std::invalid_argument("sampled_expectation: qubit count mismatch");
  double e = 0.0;
  const double n = static_cast<double>(shots);
  for (const auto& t : h.terms()) {
    if (t.is_identity()) {
      e += t.coefficient;
      continue;
    }
    const double p_plus = std::clamp((1.0 + pauli_expectation(s, t.masks())) / 2.0, 0.0, 1.0);
    const double plus = static_cast<double>(rng.binomial(shots, p_plus));
    e += t.coefficient * (2.0 * plus - n) / n;
  }
  return e;
}

inline double zero_probability(const Statevector& s) { return std::norm(s[0]); }

inline double sampled_zero_probability(const Statevector& s, std::uint64_t shots, RandomStream& rng) {
  if (shots == 0) throw std::invalid_argument("sampled_zero_probability: shots must be positive");
  const double p = std::clamp(zero_probability(s), 0.0, 1.0);
  return static_cast<double>(rng.binomial(shots, p)) / static_cast<double>(shots);
}

/// One gate per line: `KIND site [target] [p<index>]`, after a header line
/// `qubits <n> params <d>`. Blank lines and `#` comments are ignored on read.
inline std::string to_text(const Circuit& c) {
  std::ostringstream out;
  out << "qubits " << c.qubit_count() << " params " << c.param_count() << '\n';
  for (const Gate& g : c.gates()) {
    out << gate_name(g.kind) << ' ' << g.site;
    if (g.kind == GateKind::CNOT) out << ' ' << g.target;
    if (is_rotation(g.kind)) out << " p" << g.param_index;
    out << '\n';
  }
  return out.str();
}

inline Circuit circuit_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0, qubits = -1, params = -1;
  std::vector<Gate> gates;
  auto fail = [&](const std::string& msg) {
    throw std::invalid_argument("circuit text line " + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind)) continue;
    if (qubits < 0) {
      std::string pkey;
      if (kind != "qubits" || !(ls >> qubits >> pkey >> params) || pkey != "params")
        fail("expected header 'qubits <n> params <d>'");
      continue;
    }
    static const std::pair<const char*, GateKind> kinds[] = {
        {"RX", GateKind::RX}, {"RY", GateKind::RY}, {"RZ", GateKind::RZ}, {"H", GateKind::H},
        {"S", GateKind::S},   {"Sdg", GateKind::Sdg}, {"X", GateKind::X}, {"CNOT", GateKind::CNOT}};
    std::optional<GateKind> k;
    for (auto [name, gk] : kinds)
      if (kind == name) k = gk;
    if (!k) fail("unknown gate '" + kind + "'");
    Gate g{*k};
    if (!(ls >> g.site)) fail("missing site");
    if (*k == GateKind::CNOT && !(ls >> g.target)) fail("missing CNOT target");
    if (is_rotation(*k)) {
      std::string p;
      if (!(ls >> p) || p.size() < 2 || p[0] != 'p') fail("missing parameter reference p<index>");
      try {
        g.param_index = std::stoi(p.substr(1));
      } catch (const std::exception&) {
        fail("bad parameter reference '" + p + "'");
      }
    }
    std::string extra;
    if (ls >> extra) fail("unexpected token '" + extra + "'");
    gates.push_back(g);
  }
  if (qubits < 0) throw std::invalid_argument("circuit text: missing header");
  return Circuit(qubits, params, std::move(gates));
}

}  // namespace qnstein
