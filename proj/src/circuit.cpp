/**
 * Copyright 2026, The qlsys authors.
 *
 * This source code and the accompanying materials are made available under
 * the terms of the Apache License 2.0.
 */

#include "qlsys/circuit.hpp"

#include <algorithm>
#include <numbers>

namespace qlsys {

std::string_view to_string(GateKind kind) {
  switch (kind) {
    case GateKind::Hadamard: return "h";
    case GateKind::PhaseS: return "s";
    case GateKind::RotationY: return "ry";
    case GateKind::ControlledUnitary: return "cu";
    case GateKind::Swap: return "swap";
    case GateKind::ArbitraryUnitary: return "u";
  }
  return "?";
}

namespace {

ComplexMatrix hadamard_matrix() {
  ComplexMatrix m(2, 2);
  const Real s = 1 / std::numbers::sqrt2;
  m << s, s, s, -s;
  return m;
}

ComplexMatrix s_matrix() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = 1;
  m(1, 1) = Complex(0, 1);
  return m;
}

ComplexMatrix swap_matrix() {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1;
  return m;
}

void require_unitary(const ComplexMatrix& m, std::size_t n_targets) {
  const auto dim = Eigen::Index{1} << n_targets;
  if (m.rows() != dim || m.cols() != dim) {
    throw Error(ErrorKind::DimensionMismatch, "gate matrix does not match its target count");
  }
  if (!(unitarity_defect(m) < kStructuralTol)) {
    throw Error(ErrorKind::NotUnitary, "gate matrix is not unitary");
  }
}

// Applies `block` to the target qubits of every column of `m` (rows index
// the 2^n basis), restricted to basis states whose controls match.
template <typename Derived>
void apply_block(Eigen::MatrixBase<Derived>& m, int n, const std::vector<int>& targets,
                 const std::vector<Control>& controls, const ComplexMatrix& block) {
  const int k = static_cast<int>(targets.size());
  const Eigen::Index sub = Eigen::Index{1} << k;
  std::vector<Eigen::Index> offsets(static_cast<std::size_t>(sub), 0);
  std::size_t target_mask = 0;
  for (int i = 0; i < k; ++i) target_mask |= qubit_bit(n, targets[static_cast<std::size_t>(i)]);
  for (Eigen::Index s = 0; s < sub; ++s) {
    std::size_t off = 0;
    for (int i = 0; i < k; ++i) {
      if (s & (Eigen::Index{1} << (k - 1 - i))) off |= qubit_bit(n, targets[static_cast<std::size_t>(i)]);
    }
    offsets[static_cast<std::size_t>(s)] = static_cast<Eigen::Index>(off);
  }
  std::size_t control_mask = 0;
  std::size_t control_value = 0;
  for (const auto& c : controls) {
    control_mask |= qubit_bit(n, c.qubit);
    if (c.value) control_value |= qubit_bit(n, c.qubit);
  }

  const Eigen::Index dim = m.rows();
  ComplexMatrix gathered(sub, m.cols());
  for (Eigen::Index base = 0; base < dim; ++base) {
    const auto b = static_cast<std::size_t>(base);
    if (b & target_mask) continue;
    if ((b & control_mask) != control_value) continue;
    for (Eigen::Index s = 0; s < sub; ++s) gathered.row(s) = m.row(base + offsets[static_cast<std::size_t>(s)]);
    gathered = (block * gathered).eval();
    for (Eigen::Index s = 0; s < sub; ++s) m.row(base + offsets[static_cast<std::size_t>(s)]) = gathered.row(s);
  }
}

// rho -> K rho K^dagger for a block acting on `targets`.
ComplexMatrix conjugate_by(const ComplexMatrix& rho, int n, const std::vector<int>& targets,
                           const std::vector<Control>& controls, const ComplexMatrix& block) {
  ComplexMatrix left = rho;
  apply_block(left, n, targets, controls, block);
  ComplexMatrix right = left.adjoint();
  apply_block(right, n, targets, controls, block);
  return right.adjoint();
}

}  // namespace

//-------------------------------------------------------------------------
// Gate
//-------------------------------------------------------------------------

Gate::Gate(GateKind kind, std::vector<int> targets, std::vector<Control> controls, ComplexMatrix block,
           Real angle)
    : kind_(kind),
      targets_(std::move(targets)),
      controls_(std::move(controls)),
      block_(std::move(block)),
      angle_(angle) {}

Gate Gate::hadamard(int q) { return Gate(GateKind::Hadamard, {q}, {}, hadamard_matrix(), 0); }

Gate Gate::phase_s(int q) { return Gate(GateKind::PhaseS, {q}, {}, s_matrix(), 0); }

Gate Gate::rotation_y(int q, Real theta) {
  return Gate(GateKind::RotationY, {q}, {}, ry_matrix(theta), theta);
}

Gate Gate::swap(int a, int b) { return Gate(GateKind::Swap, {a, b}, {}, swap_matrix(), 0); }

Gate Gate::controlled(std::vector<Control> controls, std::vector<int> targets, ComplexMatrix block) {
  require_unitary(block, targets.size());
  for (const auto& c : controls) {
    if (c.value != 0 && c.value != 1) {
      throw Error(ErrorKind::InvalidArgument, "control value must be 0 or 1");
    }
  }
  return Gate(GateKind::ControlledUnitary, std::move(targets), std::move(controls), std::move(block), 0);
}

Gate Gate::unitary(std::vector<int> targets, ComplexMatrix matrix) {
  require_unitary(matrix, targets.size());
  return Gate(GateKind::ArbitraryUnitary, std::move(targets), {}, std::move(matrix), 0);
}

void Gate::validate(int n_qubits) const {
  if (targets_.empty()) throw Error(ErrorKind::InvalidArgument, "gate without targets");
  std::vector<int> all = targets_;
  for (const auto& c : controls_) all.push_back(c.qubit);
  for (int q : all) {
    if (q < 0 || q >= n_qubits) {
      throw Error(ErrorKind::IndexOutOfRange,
                  "qubit " + std::to_string(q) + " on a " + std::to_string(n_qubits) + "-qubit register");
    }
  }
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
    throw Error(ErrorKind::IndexOutOfRange, "gate qubits are not distinct");
  }
}

Gate Gate::inverse() const {
  switch (kind_) {
    case GateKind::Hadamard:
    case GateKind::Swap:
      return *this;
    case GateKind::RotationY:
      return rotation_y(targets_[0], -angle_);
    case GateKind::PhaseS:
      return unitary(targets_, block_.adjoint());
    case GateKind::ControlledUnitary:
      return controlled(controls_, targets_, block_.adjoint());
    case GateKind::ArbitraryUnitary:
      return unitary(targets_, block_.adjoint());
  }
  return *this;
}

//-------------------------------------------------------------------------
// Circuit
//-------------------------------------------------------------------------

Circuit::Circuit(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1) throw Error(ErrorKind::InvalidArgument, "circuit needs at least one qubit");
}

Circuit& Circuit::add(Gate g) {
  g.validate(n_qubits_);
  gates_.push_back(std::move(g));
  return *this;
}

Circuit& Circuit::append(const Circuit& other) {
  if (other.n_qubits() != n_qubits_) {
    throw Error(ErrorKind::WidthMismatch, "appending a circuit of different width");
  }
  for (const auto& g : other.gates()) gates_.push_back(g);
  return *this;
}

void Circuit::set_register(const std::string& name, std::vector<int> qubits) {
  for (int q : qubits) {
    if (q < 0 || q >= n_qubits_) throw Error(ErrorKind::IndexOutOfRange, "register " + name);
  }
  registers_[name] = std::move(qubits);
}

const std::vector<int>& Circuit::register_qubits(const std::string& name) const {
  auto it = registers_.find(name);
  if (it == registers_.end()) throw Error(ErrorKind::InvalidArgument, "no register named " + name);
  return it->second;
}

Circuit Circuit::inverse() const {
  Circuit out(n_qubits_);
  out.registers_ = registers_;
  for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) out.gates_.push_back(it->inverse());
  return out;
}

//-------------------------------------------------------------------------
// Pure-state engine
//-------------------------------------------------------------------------

PureState apply_gate(const PureState& state, const Gate& g) {
  g.validate(state.n_qubits());
  ComplexVector v = state.amplitudes();
  apply_block(v, state.n_qubits(), g.targets(), g.controls(), g.block());
  return PureState(std::move(v));
}

PureState run_circuit(const PureState& state, const Circuit& c) {
  if (state.n_qubits() != c.n_qubits()) {
    throw Error(ErrorKind::WidthMismatch, "state has " + std::to_string(state.n_qubits()) +
                                              " qubits, circuit has " + std::to_string(c.n_qubits()));
  }
  ComplexVector v = state.amplitudes();
  for (const auto& g : c.gates()) apply_block(v, c.n_qubits(), g.targets(), g.controls(), g.block());
  return PureState(std::move(v));
}

ComplexMatrix circuit_unitary(const Circuit& c) {
  const auto dim = Eigen::Index{1} << c.n_qubits();
  ComplexMatrix u = ComplexMatrix::Identity(dim, dim);
  for (const auto& g : c.gates()) apply_block(u, c.n_qubits(), g.targets(), g.controls(), g.block());
  return u;
}

Circuit qft(int t, int n_qubits, int first) {
  if (t < 1) throw Error(ErrorKind::InvalidArgument, "qft width must be >= 1");
  if (first < 0 || first + t > n_qubits) throw Error(ErrorKind::IndexOutOfRange, "qft register");
  Circuit c(n_qubits);
  for (int j = 0; j < t; ++j) {
    c.add(Gate::hadamard(first + j));
    for (int k = j + 1; k < t; ++k) {
      // controlled R_m with R_2 = S
      const int m = k - j + 1;
      ComplexMatrix phase = ComplexMatrix::Identity(2, 2);
      phase(1, 1) = std::polar(1.0, 2 * std::numbers::pi / static_cast<Real>(Eigen::Index{1} << m));
      c.add(Gate::controlled({{first + k, 1}}, {first + j}, phase));
    }
  }
  for (int j = 0; j < t / 2; ++j) c.add(Gate::swap(first + j, first + t - 1 - j));
  return c;
}

Circuit inverse_qft(int t, int n_qubits, int first) { return qft(t, n_qubits, first).inverse(); }

//-------------------------------------------------------------------------
// Noise
//-------------------------------------------------------------------------

NoiseChannel::NoiseChannel(Kind kind, std::vector<ComplexMatrix> kraus)
    : kind_(kind), kraus_(std::move(kraus)) {
  for (const auto& k : kraus_) {
    if (k.rows() != 2 || k.cols() != 2) {
      throw Error(ErrorKind::DimensionMismatch, "single-qubit Kraus operators are 2x2");
    }
  }
  if (kraus_.empty() || !(completeness_defect() < kStructuralTol)) {
    throw Error(ErrorKind::IncompleteKrausSet, "sum K^dagger K != I");
  }
}

NoiseChannel NoiseChannel::dephasing(Real t2, Real duration) {
  if (!(t2 > 0) || duration < 0) throw Error(ErrorKind::InvalidArgument, "dephasing needs T2 > 0, t >= 0");
  const Real decay = std::exp(-duration / t2);
  ComplexMatrix k0 = ComplexMatrix::Identity(2, 2) * std::sqrt((1 + decay) / 2);
  ComplexMatrix k1 = ComplexMatrix::Zero(2, 2);
  k1(0, 0) = std::sqrt((1 - decay) / 2);
  k1(1, 1) = -std::sqrt((1 - decay) / 2);
  return NoiseChannel(Kind::Dephasing, {k0, k1});
}

NoiseChannel NoiseChannel::depolarizing(Real p) {
  if (p < 0 || p > 1) throw Error(ErrorKind::InvalidArgument, "depolarizing probability outside [0,1]");
  ComplexMatrix x(2, 2), y(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  y << 0, Complex(0, -1), Complex(0, 1), 0;
  z << 1, 0, 0, -1;
  const Real a = std::sqrt(1 - 3 * p / 4);
  const Real b = std::sqrt(p / 4);
  return NoiseChannel(Kind::Depolarizing, {a * ComplexMatrix::Identity(2, 2), b * x, b * y, b * z});
}

NoiseChannel NoiseChannel::from_kraus(std::vector<ComplexMatrix> kraus) {
  return NoiseChannel(Kind::Dephasing, std::move(kraus));
}

Real NoiseChannel::completeness_defect() const {
  ComplexMatrix sum = ComplexMatrix::Zero(2, 2);
  for (const auto& k : kraus_) sum += k.adjoint() * k;
  return (sum - ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff();
}

DensityMatrix apply_gate(const DensityMatrix& rho, const Gate& g) {
  g.validate(rho.n_qubits());
  return DensityMatrix(conjugate_by(rho.matrix(), rho.n_qubits(), g.targets(), g.controls(), g.block()));
}

namespace {

ComplexMatrix apply_channel_raw(const ComplexMatrix& rho, int n, const NoiseChannel& channel, int qubit) {
  ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
  for (const auto& k : channel.kraus()) out += conjugate_by(rho, n, {qubit}, {}, k);
  return out;
}

}  // namespace

DensityMatrix apply_channel(const DensityMatrix& rho, const NoiseChannel& channel, int qubit) {
  if (qubit < 0 || qubit >= rho.n_qubits()) throw Error(ErrorKind::IndexOutOfRange, "channel qubit");
  return DensityMatrix(apply_channel_raw(rho.matrix(), rho.n_qubits(), channel, qubit));
}

DensityMatrix evolve_density(const DensityMatrix& rho, const Circuit& c,
                             const std::optional<NoiseSchedule>& noise) {
  const int n = c.n_qubits();
  if (rho.n_qubits() != n) throw Error(ErrorKind::WidthMismatch, "density matrix vs circuit width");

  std::vector<NoiseChannel> dephase;
  if (noise && !noise->t2_star.empty() && noise->total_duration > 0) {
    const auto& t2 = noise->t2_star;
    if (t2.size() != 1 && t2.size() != static_cast<std::size_t>(n)) {
      throw Error(ErrorKind::DimensionMismatch, "t2_star needs one entry or one per qubit");
    }
    const Real slice = noise->total_duration / static_cast<Real>(std::max<std::size_t>(c.size(), 1));
    for (int q = 0; q < n; ++q) {
      dephase.push_back(NoiseChannel::dephasing(t2[t2.size() == 1 ? 0 : static_cast<std::size_t>(q)], slice));
    }
  }
  auto dephase_all = [&](ComplexMatrix& m) {
    for (int q = 0; q < static_cast<int>(dephase.size()); ++q) {
      m = apply_channel_raw(m, n, dephase[static_cast<std::size_t>(q)], q);
    }
  };

  ComplexMatrix m = rho.matrix();
  for (const auto& g : c.gates()) {
    m = conjugate_by(m, n, g.targets(), g.controls(), g.block());
    dephase_all(m);
  }
  if (c.empty()) dephase_all(m);
  if (noise && noise->depolarizing_probability > 0) {
    const auto channel = NoiseChannel::depolarizing(noise->depolarizing_probability);
    for (int q = 0; q < n; ++q) m = apply_channel_raw(m, n, channel, q);
  }
  m = 0.5 * (m + m.adjoint()).eval();
  return DensityMatrix(std::move(m));
}

//-------------------------------------------------------------------------
// Measurement
//-------------------------------------------------------------------------

namespace {

constexpr Real kMinBranchProbability = 1e-14;

void check_measurement(int n, int q, int outcome) {
  if (q < 0 || q >= n) throw Error(ErrorKind::IndexOutOfRange, "measured qubit " + std::to_string(q));
  if (outcome != 0 && outcome != 1) throw Error(ErrorKind::InvalidArgument, "outcome must be 0 or 1");
}

}  // namespace

MeasurementOutcome<PureState> measure_qubit(const PureState& state, int q, int outcome) {
  const int n = state.n_qubits();
  check_measurement(n, q, outcome);
  const auto bit = qubit_bit(n, q);
  ComplexVector v = state.amplitudes();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const bool one = (static_cast<std::size_t>(i) & bit) != 0;
    if (one != (outcome == 1)) v(i) = 0;
  }
  const Real p = v.squaredNorm();
  if (p < kMinBranchProbability) {
    throw Error(ErrorKind::ZeroProbabilityBranch, "outcome " + std::to_string(outcome) + " on qubit " +
                                                      std::to_string(q) + " has probability " + std::to_string(p));
  }
  return {p, PureState(v / std::sqrt(p))};
}

MeasurementOutcome<DensityMatrix> measure_qubit(const DensityMatrix& rho, int q, int outcome) {
  const int n = rho.n_qubits();
  check_measurement(n, q, outcome);
  const auto bit = qubit_bit(n, q);
  ComplexMatrix m = rho.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const bool one = (static_cast<std::size_t>(i) & bit) != 0;
    if (one != (outcome == 1)) {
      m.row(i).setZero();
      m.col(i).setZero();
    }
  }
  const Real p = m.trace().real();
  if (p < kMinBranchProbability) {
    throw Error(ErrorKind::ZeroProbabilityBranch, "outcome " + std::to_string(outcome) + " on qubit " +
                                                      std::to_string(q) + " has probability " + std::to_string(p));
  }
  return {p, DensityMatrix(m / p)};
}

}  // namespace qlsys
