#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "qlsys/circuit.hpp"
#include "support/generators.hpp"

using namespace qlsys;
using qlsys::testing::max_abs;
using qlsys::testing::Rng;

namespace {

constexpr Real kPi = std::numbers::pi;

/// Full 2^n unitary of one gate, assembled element by element.
ComplexMatrix dense_oracle(const Gate& g, int n) {
  const std::size_t dim = std::size_t{1} << n;
  ComplexMatrix u = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  std::size_t target_mask = 0;
  for (int q : g.targets()) target_mask |= qubit_bit(n, q);
  auto sub_index = [&](std::size_t s) {
    std::size_t idx = 0;
    for (int q : g.targets()) idx = (idx << 1) | ((s & qubit_bit(n, q)) ? 1 : 0);
    return static_cast<Eigen::Index>(idx);
  };
  for (std::size_t col = 0; col < dim; ++col) {
    bool active = true;
    for (const auto& c : g.controls()) active = active && (((col & qubit_bit(n, c.qubit)) ? 1 : 0) == c.value);
    for (std::size_t row = 0; row < dim; ++row) {
      if ((row & ~target_mask) != (col & ~target_mask)) continue;
      const auto r = static_cast<Eigen::Index>(row), c = static_cast<Eigen::Index>(col);
      if (active) {
        u(r, c) = g.block()(sub_index(row), sub_index(col));
      } else {
        u(r, c) = row == col ? 1.0 : 0.0;
      }
    }
  }
  return u;
}

Gate random_gate(Rng& rng, int n) {
  std::vector<int> qubits(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) qubits[static_cast<std::size_t>(i)] = i;
  for (int i = n - 1; i > 0; --i) std::swap(qubits[static_cast<std::size_t>(i)], qubits[static_cast<std::size_t>(rng.integer(0, i))]);
  switch (rng.integer(0, 5)) {
    case 0: return Gate::hadamard(qubits[0]);
    case 1: return Gate::phase_s(qubits[0]);
    case 2: return Gate::rotation_y(qubits[0], rng.uniform(-kPi, kPi));
    case 3:
      if (n < 2) return Gate::hadamard(qubits[0]);
      return Gate::swap(qubits[0], qubits[1]);
    case 4: {
      const int nt = rng.integer(1, std::min(2, n));
      std::vector<int> targets(qubits.begin(), qubits.begin() + nt);
      return Gate::unitary(targets, qlsys::testing::random_unitary(rng, Eigen::Index{1} << nt));
    }
    default: {
      if (n < 2) return Gate::hadamard(qubits[0]);
      const int nt = rng.integer(1, std::min(2, n - 1));
      std::vector<int> targets(qubits.begin(), qubits.begin() + nt);
      std::vector<Control> controls;
      const int nc = rng.integer(1, n - nt);
      for (int i = 0; i < nc; ++i) controls.push_back({qubits[static_cast<std::size_t>(nt + i)], rng.integer(0, 1)});
      return Gate::controlled(controls, targets, qlsys::testing::random_unitary(rng, Eigen::Index{1} << nt));
    }
  }
}

Circuit random_circuit(Rng& rng, int n, int depth) {
  Circuit c(n);
  for (int i = 0; i < depth; ++i) c.add(random_gate(rng, n));
  return c;
}

ComplexMatrix qft_oracle(int t) {
  const Eigen::Index dim = Eigen::Index{1} << t;
  ComplexMatrix f(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index k = 0; k < dim; ++k) {
      f(j, k) = std::polar(1.0 / std::sqrt(static_cast<Real>(dim)), 2 * kPi * static_cast<Real>(j * k) / static_cast<Real>(dim));
    }
  }
  return f;
}

}  // namespace

TEST(ApplyGate, Hadamard) {
  const auto out = apply_gate(PureState::basis(1, 0), Gate::hadamard(0));
  EXPECT_NEAR(out[0].real(), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(out[1].real(), 1 / std::sqrt(2.0), 1e-15);
}

TEST(ApplyGate, SwapExchangesQubits) {
  const auto out = apply_gate(PureState::basis(2, 0b01), Gate::swap(0, 1));
  EXPECT_NEAR(out.probability(0b10), 1.0, 1e-15);
}

TEST(ApplyGate, PhaseS) {
  const auto out = apply_gate(PureState::basis(1, 1), Gate::phase_s(0));
  EXPECT_NEAR(out[1].imag(), 1.0, 1e-15);
  EXPECT_NEAR(out[1].real(), 0.0, 1e-15);
}

TEST(ApplyGate, RotationYMatrix) {
  const Real theta = 0.9;
  const auto out = apply_gate(PureState::basis(1, 0), Gate::rotation_y(0, theta));
  EXPECT_NEAR(out[0].real(), std::cos(theta / 2), 1e-15);
  EXPECT_NEAR(out[1].real(), std::sin(theta / 2), 1e-15);
}

TEST(ApplyGate, OutOfRange) {
  try {
    apply_gate(PureState::basis(2, 0), Gate::hadamard(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IndexOutOfRange);
  }
  EXPECT_THROW(Gate::swap(1, 1).validate(2), Error);
}

TEST(ApplyGate, RejectsNonUnitaryBlock) {
  EXPECT_THROW(Gate::unitary({0}, 2.0 * ComplexMatrix::Identity(2, 2)), Error);
}

TEST(RunCircuit, EmptyIsIdentity) {
  Rng rng(1);
  const auto psi = qlsys::testing::random_pure(rng, 3);
  EXPECT_LT((run_circuit(psi, Circuit(3)).amplitudes() - psi.amplitudes()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(RunCircuit, WidthMismatch) {
  try {
    run_circuit(PureState::basis(2, 0), Circuit(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::WidthMismatch);
  }
}

TEST(RunCircuit, InverseRestoresInput) {
  Rng rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = rng.integer(1, 5);
    const Circuit c = random_circuit(rng, n, 12);
    const auto psi = qlsys::testing::random_pure(rng, n);
    const auto back = run_circuit(run_circuit(psi, c), c.inverse());
    EXPECT_LT((back.amplitudes() - psi.amplitudes()).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(RunCircuit, DenseOracleEquivalence) {
  Rng rng(3);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = rng.integer(1, 5);
    const Circuit c = random_circuit(rng, n, rng.integer(1, 15));
    const Eigen::Index dim = Eigen::Index{1} << n;
    ComplexMatrix product = ComplexMatrix::Identity(dim, dim);
    for (const auto& g : c.gates()) product = (dense_oracle(g, n) * product).eval();
    const auto psi = qlsys::testing::random_pure(rng, n);
    const auto out = run_circuit(psi, c);
    EXPECT_LT((out.amplitudes() - product * psi.amplitudes()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_NEAR(out.amplitudes().norm(), 1.0, 1e-10);
    EXPECT_LT(max_abs(circuit_unitary(c) - product), 1e-9);
  }
}

TEST(Qft, SingleQubitIsHadamard) {
  ComplexMatrix h(2, 2);
  h << 1, 1, 1, -1;
  h /= std::sqrt(2.0);
  EXPECT_LT(max_abs(circuit_unitary(qft(1)) - h), 1e-12);
}

TEST(Qft, MatchesFourierMatrix) {
  for (int t = 1; t <= 5; ++t) {
    EXPECT_LT(max_abs(circuit_unitary(qft(t)) - qft_oracle(t)), 1e-10) << "t=" << t;
    EXPECT_LT(max_abs(circuit_unitary(inverse_qft(t)) - qft_oracle(t).adjoint()), 1e-10) << "t=" << t;
  }
}

TEST(Qft, UniformFromZero) {
  const auto out = run_circuit(PureState::basis(2, 0), qft(2));
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(out[i] - Complex(0.5, 0)), 0.0, 1e-12);
}

TEST(Qft, RoundTrip) {
  Circuit c = qft(2);
  c.append(inverse_qft(2));
  EXPECT_LT(max_abs(circuit_unitary(c) - ComplexMatrix::Identity(4, 4)), 1e-10);
}

TEST(Noise, KrausCompleteness) {
  EXPECT_LT(NoiseChannel::dephasing(500, 50).completeness_defect(), 1e-10);
  EXPECT_LT(NoiseChannel::depolarizing(0.2).completeness_defect(), 1e-10);
  try {
    NoiseChannel::from_kraus({0.5 * ComplexMatrix::Identity(2, 2)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IncompleteKrausSet);
  }
}

TEST(Noise, DephasingZeroDurationIsIdentity) {
  Rng rng(4);
  const auto rho = qlsys::testing::random_density(rng, 1);
  const auto out = apply_channel(rho, NoiseChannel::dephasing(1.0, 0.0), 0);
  EXPECT_LT(max_abs(out.matrix() - rho.matrix()), 1e-15);
}

TEST(Noise, DephasingDecaysCoherence) {
  ComplexVector plus(2);
  plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  const auto rho = DensityMatrix::from_pure(PureState(plus));
  const auto out = apply_channel(rho, NoiseChannel::dephasing(500, 50), 0);
  EXPECT_NEAR(std::abs(out.matrix()(0, 1)) / std::abs(rho.matrix()(0, 1)), std::exp(-0.1), 1e-12);
  EXPECT_NEAR(out.matrix()(0, 0).real(), 0.5, 1e-15);
}

TEST(Noise, DepolarizingMixesTowardIdentity) {
  const auto rho = DensityMatrix::from_pure(PureState::basis(1, 0));
  const auto out = apply_channel(rho, NoiseChannel::depolarizing(1.0), 0);
  EXPECT_LT(max_abs(out.matrix() - 0.5 * ComplexMatrix::Identity(2, 2)), 1e-12);
}

TEST(EvolveDensity, NoiselessMatchesPure) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = rng.integer(1, 4);
    const Circuit c = random_circuit(rng, n, 10);
    const auto psi = qlsys::testing::random_pure(rng, n);
    const auto rho = evolve_density(DensityMatrix::from_pure(psi), c, std::nullopt);
    const auto expect = DensityMatrix::from_pure(run_circuit(psi, c));
    EXPECT_LT(max_abs(rho.matrix() - expect.matrix()), 1e-10);
  }
}

TEST(EvolveDensity, NoisyPreservesTrace) {
  Rng rng(9);
  const Circuit c = random_circuit(rng, 3, 12);
  NoiseSchedule noise{{500, 400, 300}, 50, 0.01};
  const auto rho = evolve_density(qlsys::testing::random_density(rng, 3), c, noise);
  EXPECT_NEAR(rho.matrix().trace().real(), 1.0, 1e-10);
  EXPECT_LT(hermiticity_defect(rho.matrix()), 1e-10);
}

TEST(Measure, Examples) {
  const auto zero = measure_qubit(PureState::basis(1, 0), 0, 0);
  EXPECT_NEAR(zero.probability, 1.0, 1e-15);
  EXPECT_NEAR(zero.state.probability(0), 1.0, 1e-15);

  ComplexVector plus(2);
  plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  const auto one = measure_qubit(PureState(plus), 0, 1);
  EXPECT_NEAR(one.probability, 0.5, 1e-15);
  EXPECT_NEAR(one.state.probability(1), 1.0, 1e-15);

  try {
    measure_qubit(PureState::basis(1, 0), 0, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ZeroProbabilityBranch);
  }
}

TEST(Measure, DensityAgreesWithPure) {
  Rng rng(10);
  const auto psi = qlsys::testing::random_pure(rng, 3);
  for (int q = 0; q < 3; ++q) {
    const auto a = measure_qubit(psi, q, 1);
    const auto b = measure_qubit(DensityMatrix::from_pure(psi), q, 1);
    EXPECT_NEAR(a.probability, b.probability, 1e-12);
    EXPECT_LT(max_abs(DensityMatrix::from_pure(a.state).matrix() - b.state.matrix()), 1e-12);
  }
}

TEST(CircuitText, RoundTrip) {
  Rng rng(11);
  Circuit c = random_circuit(rng, 4, 20);
  c.set_register("clock", {0, 1});
  c.set_register("b", {2});
  const Circuit back = parse_circuit(serialize(c));
  EXPECT_EQ(back.size(), c.size());
  EXPECT_EQ(back.registers(), c.registers());
  EXPECT_EQ(max_abs(circuit_unitary(back) - circuit_unitary(c)), 0.0);
  EXPECT_EQ(serialize(back), serialize(c));
}

TEST(CircuitText, Malformed) {
  try {
    parse_circuit("qubits 2\nh targets=5\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(e.kind() == ErrorKind::ConfigParseError || e.kind() == ErrorKind::IndexOutOfRange);
  }
  EXPECT_THROW(parse_circuit("qubits x\n"), Error);
}
