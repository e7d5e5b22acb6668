#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "qnstein/ansatz.hpp"

using namespace qnstein;

namespace {

Params random_params(std::mt19937_64& gen, int d) {
  std::uniform_real_distribution<double> u(-M_PI, M_PI);
  Params t(d);
  for (int i = 0; i < d; ++i) t[i] = u(gen);
  return t;
}

// Removes the global phase so the largest entry is real positive.
Eigen::MatrixXcd dephase(const Eigen::MatrixXcd& g) {
  Eigen::Index r = 0, c = 0;
  g.cwiseAbs().maxCoeff(&r, &c);
  return g * std::exp(Complex(0, -std::arg(g(r, c))));
}

void expect_real_orthogonal(const Eigen::MatrixXcd& g, double tol) {
  const Eigen::MatrixXcd m = dephase(g);
  EXPECT_LT(m.imag().cwiseAbs().maxCoeff(), tol);
  const Eigen::MatrixXd r = m.real();
  EXPECT_LT((r.transpose() * r - Eigen::MatrixXd::Identity(r.rows(), r.cols())).norm(), tol);
  EXPECT_NEAR(r.determinant(), 1.0, tol);
}

}  // namespace

TEST(HardwareEfficient, Counts) {
  const Circuit c = hardware_efficient(2, 1);
  EXPECT_EQ(c.param_count(), 2);
  EXPECT_EQ(c.gates().size(), 3u);
  EXPECT_EQ(hardware_efficient(12, 3).param_count(), 36);
}

TEST(HardwareEfficient, Layout) {
  const Circuit c = hardware_efficient(3, 2);
  const std::vector<Gate> expected = {Gate::ry(0, 0), Gate::ry(1, 1), Gate::ry(2, 2), Gate::cnot(0, 1), Gate::cnot(1, 2),
                                      Gate::ry(0, 3), Gate::ry(1, 4), Gate::ry(2, 5), Gate::cnot(0, 1), Gate::cnot(1, 2)};
  EXPECT_EQ(c.gates(), expected);
}

TEST(HardwareEfficient, Guards) {
  EXPECT_THROW(hardware_efficient(1, 1), std::invalid_argument);
  EXPECT_THROW(hardware_efficient(2, 0), std::invalid_argument);
}

TEST(So4, ZeroAnglesIdentityUpToPhase) {
  const Eigen::MatrixXcd g = dephase(so4_gate(Params::Zero(6)));
  EXPECT_LT((g - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(So4, RandomDrawsAreRealOrthogonal) {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 200; ++trial) expect_real_orthogonal(so4_gate(random_params(gen, 6)), 1e-9);
}

TEST(So4, CompositionStaysOrthogonal) {
  std::mt19937_64 gen(22);
  const Eigen::MatrixXcd g = so4_gate(random_params(gen, 6)) * so4_gate(random_params(gen, 6));
  expect_real_orthogonal(g, 1e-9);
}

TEST(So4, WrongParameterCount) { EXPECT_THROW(so4_gate(Params::Zero(5)), std::invalid_argument); }

TEST(SchwingerAnsatz, Dimensions) {
  EXPECT_EQ(schwinger_ansatz(4, 1).param_count(), 18);
  EXPECT_EQ(schwinger_ansatz(2, 1).param_count(), 6);
  EXPECT_EQ(schwinger_ansatz(8, 2).param_count(), 84);
  EXPECT_EQ(schwinger_ansatz(4, 1, BondPattern::Sequential).param_count(), 18);
}

TEST(SchwingerAnsatz, BrickWallOrder) {
  const auto bonds = so4_bonds(6, BondPattern::BrickWall);
  const std::vector<std::pair<int, int>> expected = {{0, 1}, {2, 3}, {4, 5}, {1, 2}, {3, 4}};
  EXPECT_EQ(bonds, expected);
}

TEST(SchwingerAnsatz, Guards) {
  EXPECT_THROW(schwinger_ansatz(3, 1), std::invalid_argument);
  EXPECT_THROW(schwinger_ansatz(4, 0), std::invalid_argument);
}

TEST(SchwingerAnsatz, ZeroAnglesGiveStaggeredVacuum) {
  const Circuit c = schwinger_ansatz(4, 2);
  const Statevector s = apply_circuit(c, Params::Zero(c.param_count()));
  EXPECT_NEAR(std::norm(s[0b0101]), 1.0, 1e-12);
  // Hopping vanishes on a basis state; mass and field terms are diagonal.
  const double mu = 0.5;
  const int z[] = {1, -1, 1, -1};
  double expected = 0.0, field = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double sign = i % 2 == 0 ? 1.0 : -1.0;
    expected += mu / 2 * (1 + sign * z[i]);
    field += 0.5 * sign * z[i];
    if (i < 3) expected += field * field;
  }
  const PauliSum h = build_schwinger(4, 1.0, mu, 0.0);
  EXPECT_NEAR(loss(c, h, Params::Zero(c.param_count())), expected, 1e-12);
  EXPECT_NEAR(expected, to_dense(h)(0b0101, 0b0101).real(), 1e-12);
}

TEST(SchwingerAnsatz, ZeroInitialStateOption) {
  const Circuit c = schwinger_ansatz(4, 1, BondPattern::BrickWall, InitialState::Zero);
  const Statevector s = apply_circuit(c, Params::Zero(c.param_count()));
  EXPECT_NEAR(std::norm(s[0]), 1.0, 1e-12);
}

TEST(Fidelity, Examples) {
  const Circuit c = single_qubit_ry();
  RandomStream rng(1);
  EXPECT_DOUBLE_EQ(fidelity(c, Params::Constant(1, 0.3), Params::Constant(1, 0.3)), 1.0);
  EXPECT_DOUBLE_EQ(fidelity(c, Params::Constant(1, 0.3), Params::Constant(1, 0.3), 100, rng), 1.0);
  EXPECT_NEAR(fidelity(c, Params::Zero(1), Params::Constant(1, M_PI)), 0.0, 1e-15);
  EXPECT_NEAR(fidelity(c, Params::Zero(1), Params::Constant(1, 0.1)), 0.9975020826390129, 1e-12);
}

TEST(Fidelity, SymmetricAndBounded) {
  std::mt19937_64 gen(23);
  RandomStream rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const Circuit c = trial % 2 ? hardware_efficient(3, 2) : schwinger_ansatz(2, 1);
    const Params a = random_params(gen, c.param_count()), b = random_params(gen, c.param_count());
    const double ab = fidelity(c, a, b);
    EXPECT_NEAR(ab, fidelity(c, b, a), 1e-10);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0 + 1e-12);
    const double sampled = fidelity(c, a, b, 64, rng);
    EXPECT_GE(sampled, 0.0);
    EXPECT_LE(sampled, 1.0);
  }
}

TEST(Fidelity, ParameterLengthMismatch) {
  EXPECT_THROW(fidelity(hardware_efficient(2, 1), Params::Zero(2), Params::Zero(3)), std::invalid_argument);
}

TEST(Loss, AllZerosState) {
  for (int n : {2, 3, 5}) {
    const Circuit c = hardware_efficient(n, 2);
    EXPECT_NEAR(loss(c, build_tfim(n, -1.0, -2.0), Params::Zero(c.param_count())), -1.0 * (n - 1), 1e-12);
  }
}

TEST(Loss, ConstantHamiltonian) {
  std::mt19937_64 gen(24);
  const Circuit c = hardware_efficient(3, 1);
  RandomStream rng(3);
  EXPECT_NEAR(loss(c, PauliSum::identity(3, -0.7), random_params(gen, 3)), -0.7, 1e-15);
  EXPECT_DOUBLE_EQ(loss(c, PauliSum::identity(3, -0.7), random_params(gen, 3), 10, rng), -0.7);
  EXPECT_THROW(loss(c, PauliSum::identity(2, 1.0), Params::Zero(3)), std::invalid_argument);
}

TEST(Loss, VariationalBoundAboveGround) {
  std::mt19937_64 gen(25);
  const PauliSum h = build_tfim(2, -1.0, -2.0);
  const double e0 = exact_ground_energy(h);
  const Circuit c = hardware_efficient(2, 2);
  for (int trial = 0; trial < 100; ++trial) EXPECT_GE(loss(c, h, random_params(gen, 4)), e0 - 1e-12);
}
