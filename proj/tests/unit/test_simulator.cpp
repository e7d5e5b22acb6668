#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "qnstein/simulator.hpp"

using namespace qnstein;

namespace {

Params vec(std::initializer_list<double> v) {
  Params p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

// Random circuit touching every gate kind; each parameter used once.
Circuit random_circuit(std::mt19937_64& gen, int n, int depth) {
  std::uniform_int_distribution<int> kind(0, 7), site(0, n - 1);
  std::vector<Gate> gates;
  int p = 0;
  for (int k = 0; k < depth; ++k) {
    const int q = site(gen);
    switch (kind(gen)) {
      case 0: gates.push_back(Gate::rx(q, p++)); break;
      case 1: gates.push_back(Gate::ry(q, p++)); break;
      case 2: gates.push_back(Gate::rz(q, p++)); break;
      case 3: gates.push_back(Gate::h(q)); break;
      case 4: gates.push_back(Gate::s(q)); break;
      case 5: gates.push_back(Gate::sdg(q)); break;
      case 6: gates.push_back(Gate::x(q)); break;
      default:
        if (n > 1) gates.push_back(Gate::cnot(q, (q + 1 + site(gen) % (n - 1)) % n));
    }
  }
  return Circuit(n, p, std::move(gates));
}

Params random_params(std::mt19937_64& gen, int d) {
  std::uniform_real_distribution<double> u(-M_PI, M_PI);
  Params t(d);
  for (int i = 0; i < d; ++i) t[i] = u(gen);
  return t;
}

Statevector plus_state() {
  return Statevector(1, {Complex(M_SQRT1_2, 0), Complex(M_SQRT1_2, 0)});
}

}  // namespace

TEST(Circuit, Validation) {
  EXPECT_THROW(Circuit(2, 1, {Gate::ry(2, 0)}), std::out_of_range);
  EXPECT_THROW(Circuit(2, 0, {Gate::cnot(1, 1)}), std::invalid_argument);
  EXPECT_THROW(Circuit(2, 1, {Gate::ry(0, 1)}), std::out_of_range);
  EXPECT_THROW(Circuit(2, 2, {Gate::ry(0, 0)}), std::invalid_argument);
  EXPECT_THROW(Circuit(2, 0, {Gate{GateKind::H, 0, -1, 0}}), std::invalid_argument);
  EXPECT_THROW(Circuit(21, 0, {}), std::invalid_argument);
}

TEST(Circuit, SingleUseParameters) {
  EXPECT_TRUE(Circuit(1, 1, {Gate::ry(0, 0)}).single_use_parameters());
  EXPECT_FALSE(Circuit(1, 1, {Gate::ry(0, 0), Gate::rz(0, 0)}).single_use_parameters());
}

TEST(Apply, EmptyCircuitIsIdentity) {
  const Statevector s = apply_circuit(Circuit(3, 0, {}), Params(0));
  EXPECT_EQ(s[0], Complex(1, 0));
  for (std::size_t i = 1; i < s.dimension(); ++i) EXPECT_EQ(s[i], Complex(0, 0));
}

TEST(Apply, RyPiFlips) {
  const Statevector s = apply_circuit(Circuit(1, 1, {Gate::ry(0, 0)}), vec({M_PI}));
  EXPECT_NEAR(std::abs(s[0]), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(s[1] - Complex(1, 0)), 0.0, 1e-12);
}

TEST(Apply, BellState) {
  const Circuit c(2, 1, {Gate::ry(0, 0), Gate::cnot(0, 1)});
  const Statevector s = apply_circuit(c, vec({M_PI / 2}));
  EXPECT_NEAR(s[0].real(), M_SQRT1_2, 1e-12);
  EXPECT_NEAR(std::abs(s[1]), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(s[2]), 0.0, 1e-12);
  EXPECT_NEAR(s[3].real(), M_SQRT1_2, 1e-12);
}

TEST(Apply, ParameterLengthMismatch) {
  EXPECT_THROW(apply_circuit(Circuit(1, 1, {Gate::ry(0, 0)}), Params(2)), std::invalid_argument);
}

TEST(Apply, NormPreservedOnRandomCircuits) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + trial % 6;
    const Circuit c = random_circuit(gen, n, 25);
    const Params t = random_params(gen, c.param_count());
    Statevector s(n);
    for (const Gate& g : c.gates()) {
      s.apply(g, is_rotation(g.kind) ? t[g.param_index] : 0.0);
      ASSERT_LT(std::abs(s.norm_squared() - 1.0), 1e-10);
    }
  }
}

TEST(Adjoint, RoundTripReturnsZeroState) {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 6;
    const Circuit c = random_circuit(gen, n, 30);
    const Params t = random_params(gen, c.param_count());
    const Statevector back = apply_adjoint_circuit(c, t, apply_circuit(c, t));
    EXPECT_GT(zero_probability(back), 1.0 - 1e-10);
  }
}

TEST(Adjoint, SThenSdgIsIdentity) {
  Statevector s(1, {Complex(0.6, 0.0), Complex(0.0, 0.8)});
  const Statevector orig = s;
  s.apply(Gate::s(0));
  s.apply_inverse(Gate::s(0));
  EXPECT_NEAR(std::abs(s.inner(orig)), 1.0, 1e-14);
  s.apply(Gate::s(0));
  s.apply(Gate::sdg(0));
  EXPECT_NEAR(std::abs(s[1] - orig[1]), 0.0, 1e-14);
}

TEST(Adjoint, RotationInverseIsNegativeAngle) {
  for (GateKind k : {GateKind::RX, GateKind::RY, GateKind::RZ}) {
    Statevector a = plus_state(), b = plus_state();
    a.apply_inverse(Gate{k, 0, -1, 0}, 0.83);
    b.apply(Gate{k, 0, -1, 0}, -0.83);
    EXPECT_NEAR(std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]), 0.0, 1e-14);
  }
}

TEST(Gates, MatricesUnitaryAndRelations) {
  for (GateKind k : {GateKind::RX, GateKind::RY, GateKind::RZ, GateKind::H, GateKind::S, GateKind::Sdg, GateKind::X}) {
    const Eigen::Matrix2cd m = gate_matrix(k, 1.234);
    EXPECT_LT((m.adjoint() * m - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff(), 1e-14) << gate_name(k);
  }
  const Eigen::Matrix2cd s = gate_matrix(GateKind::S), h = gate_matrix(GateKind::H);
  Eigen::Matrix2cd z;
  z << 1, 0, 0, -1;
  EXPECT_LT((s * s - z).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((h * h - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Gates, RotationConvention) {
  // R_Y(t) = exp(-i t Y / 2) = cos(t/2) I - i sin(t/2) Y.
  const double t = 0.4;
  const Eigen::Matrix2cd ry = gate_matrix(GateKind::RY, t);
  EXPECT_NEAR(ry(1, 0).real(), std::sin(t / 2), 1e-15);
  EXPECT_NEAR(ry(0, 1).real(), -std::sin(t / 2), 1e-15);
  const Eigen::Matrix2cd rz = gate_matrix(GateKind::RZ, t);
  EXPECT_NEAR(std::arg(rz(0, 0)), -t / 2, 1e-15);
}

TEST(Expectation, Basics) {
  const PauliSum z = PauliSum::single(1, {{0, Pauli::Z}});
  EXPECT_DOUBLE_EQ(expectation(Statevector(1), z), 1.0);
  EXPECT_NEAR(expectation(plus_state(), z), 0.0, 1e-15);
  EXPECT_THROW(expectation(Statevector(2), z), std::invalid_argument);
}

TEST(Expectation, YSign) {
  // |+i> = (|0> + i|1>)/sqrt2 has <Y> = +1.
  const Statevector s(1, {Complex(M_SQRT1_2, 0), Complex(0, M_SQRT1_2)});
  EXPECT_NEAR(expectation(s, PauliSum::single(1, {{0, Pauli::Y}})), 1.0, 1e-15);
}

TEST(Expectation, TfimGroundVector) {
  const PauliSum h = build_tfim(2, -1.0, -2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(to_dense(h));
  std::vector<Complex> amps(4);
  for (int i = 0; i < 4; ++i) amps[i] = solver.eigenvectors()(i, 0);
  EXPECT_NEAR(expectation(Statevector(2, amps), h), -std::sqrt(17.0), 1e-10);
}

TEST(Sampling, ConstantAndDeterministicCases) {
  RandomStream rng(3);
  EXPECT_DOUBLE_EQ(sampled_expectation(Statevector(2), PauliSum::identity(2, 2.5), 7, rng), 2.5);
  EXPECT_DOUBLE_EQ(sampled_expectation(Statevector(1), PauliSum::single(1, {{0, Pauli::Z}}), 13, rng), 1.0);
  EXPECT_THROW(sampled_expectation(Statevector(1), PauliSum::identity(1, 1), 0, rng), std::invalid_argument);
}

TEST(Sampling, PlusStateZMean) {
  RandomStream rng(4);
  const PauliSum z = PauliSum::single(1, {{0, Pauli::Z}});
  double mean = 0.0;
  for (int r = 0; r < 100; ++r) mean += sampled_expectation(plus_state(), z, 8192, rng);
  EXPECT_LT(std::abs(mean / 100), 0.005);
}

TEST(Sampling, ConvergesToExpectation) {
  std::mt19937_64 gen(5);
  const Circuit c = random_circuit(gen, 3, 20);
  const Statevector s = apply_circuit(c, random_params(gen, c.param_count()));
  const PauliSum h = build_tfim(3, 0.7, -1.3);
  const std::uint64_t shots = 100;
  double mean = 0.0;
  const int streams = 10000;
  for (int i = 0; i < streams; ++i) {
    RandomStream rng = RandomStream(99).split(i);
    mean += sampled_expectation(s, h, shots, rng);
  }
  mean /= streams;
  double weight = 0.0;
  for (const auto& t : h.terms()) weight += std::abs(t.coefficient);
  EXPECT_LT(std::abs(mean - expectation(s, h)), 4.0 * weight / std::sqrt(streams * double(shots)));
}

TEST(ZeroProbability, Cases) {
  RandomStream rng(6);
  EXPECT_DOUBLE_EQ(zero_probability(Statevector(3)), 1.0);
  EXPECT_DOUBLE_EQ(sampled_zero_probability(Statevector(3), 100, rng), 1.0);
  const Statevector one(1, {Complex(0, 0), Complex(1, 0)});
  EXPECT_DOUBLE_EQ(zero_probability(one), 0.0);
  EXPECT_DOUBLE_EQ(sampled_zero_probability(one, 100, rng), 0.0);
  EXPECT_THROW(sampled_zero_probability(one, 0, rng), std::invalid_argument);
}

TEST(ZeroProbability, UniformTwoQubit) {
  const Statevector u(2, std::vector<Complex>(4, Complex(0.5, 0)));
  EXPECT_NEAR(zero_probability(u), 0.25, 1e-15);
  RandomStream rng(8);
  const std::uint64_t shots = 1000;
  const int reps = 200;
  double mean = 0.0;
  for (int r = 0; r < reps; ++r) mean += sampled_zero_probability(u, shots, rng);
  mean /= reps;
  EXPECT_LT(std::abs(mean - 0.25), 3.0 * std::sqrt(0.25 * 0.75 / shots / reps));
}

TEST(RandomStream, SplitIsDeterministicAndDistinct) {
  const RandomStream root(42);
  RandomStream a = root.split(3), b = root.split(3), c = root.split(4);
  const double x = a.normal();
  EXPECT_EQ(x, b.normal());
  EXPECT_NE(x, c.normal());
}

TEST(CircuitText, RoundTrip) {
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Circuit c = random_circuit(gen, 4, 15);
    EXPECT_EQ(circuit_from_text(to_text(c)), c);
  }
}

TEST(CircuitText, Format) {
  const Circuit c(2, 1, {Gate::ry(0, 0), Gate::cnot(0, 1)});
  EXPECT_EQ(to_text(c), "qubits 2 params 1\nRY 0 p0\nCNOT 0 1\n");
  EXPECT_EQ(circuit_from_text("# bell\nqubits 2 params 1\n\nRY 0 p0  # rotate\nCNOT 0 1\n"), c);
}

TEST(CircuitText, ErrorsCarryLineNumbers) {
  try {
    circuit_from_text("qubits 1 params 0\nH 0\nFOO 0\n");
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  EXPECT_THROW(circuit_from_text("RY 0 p0\n"), std::invalid_argument);
  EXPECT_THROW(circuit_from_text("qubits 1 params 1\nRY 0\n"), std::invalid_argument);
}
