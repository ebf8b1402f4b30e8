/**
 * Copyright 2026, The qlsys authors.
 *
 * This source code and the accompanying materials are made available under
 * the terms of the Apache License 2.0.
 */

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qlsys/qcore.hpp"

namespace qlsys {

enum class GateKind { Hadamard, PhaseS, RotationY, ControlledUnitary, Swap, ArbitraryUnitary };

std::string_view to_string(GateKind kind);

/// A control qubit together with the basis value it must hold.
struct Control {
  int qubit = 0;
  int value = 1;

  bool operator==(const Control&) const = default;
};

/// One gate acting on explicit qubit indices (0 is the most significant
/// qubit). Controlled blocks may condition on 0 as well as 1.
class Gate {
 public:
  static Gate hadamard(int q);
  static Gate phase_s(int q);
  static Gate rotation_y(int q, Real theta);
  static Gate swap(int a, int b);
  static Gate controlled(std::vector<Control> controls, std::vector<int> targets, ComplexMatrix block);
  static Gate unitary(std::vector<int> targets, ComplexMatrix matrix);

  GateKind kind() const { return kind_; }
  const std::vector<int>& targets() const { return targets_; }
  const std::vector<Control>& controls() const { return controls_; }
  Real angle() const { return angle_; }

  /// Matrix acting on the target qubits (first target most significant),
  /// excluding controls.
  const ComplexMatrix& block() const { return block_; }

  /// Throws IndexOutOfRange unless every qubit index is distinct and < n.
  void validate(int n_qubits) const;

  Gate inverse() const;

 private:
  Gate(GateKind kind, std::vector<int> targets, std::vector<Control> controls, ComplexMatrix block,
       Real angle);

  GateKind kind_;
  std::vector<int> targets_;
  std::vector<Control> controls_;
  ComplexMatrix block_;
  Real angle_ = 0;
};

/// Ordered gate list over `n_qubits` qubits. Registers name contiguous or
/// scattered qubit roles (e.g. "clock", "b", "ancilla").
class Circuit {
 public:
  explicit Circuit(int n_qubits);

  int n_qubits() const { return n_qubits_; }
  const std::vector<Gate>& gates() const { return gates_; }
  std::size_t size() const { return gates_.size(); }
  bool empty() const { return gates_.empty(); }

  Circuit& add(Gate g);
  Circuit& append(const Circuit& other);

  void set_register(const std::string& name, std::vector<int> qubits);
  const std::map<std::string, std::vector<int>>& registers() const { return registers_; }
  const std::vector<int>& register_qubits(const std::string& name) const;

  /// Reversed sequence of inverted gates.
  Circuit inverse() const;

 private:
  int n_qubits_;
  std::vector<Gate> gates_;
  std::map<std::string, std::vector<int>> registers_;
};

//=========================================================================
// Pure-state engine
//=========================================================================

PureState apply_gate(const PureState& state, const Gate& g);
PureState run_circuit(const PureState& state, const Circuit& c);

/// Dense 2^n x 2^n unitary of `c`, assembled column by column.
ComplexMatrix circuit_unitary(const Circuit& c);

/// F[j,k] = exp(2 pi i jk / 2^t) / 2^{t/2} on qubits [first, first + t).
Circuit qft(int t, int n_qubits, int first = 0);
Circuit inverse_qft(int t, int n_qubits, int first = 0);
inline Circuit qft(int t) { return qft(t, t, 0); }
inline Circuit inverse_qft(int t) { return inverse_qft(t, t, 0); }

//=========================================================================
// Noise and density-matrix engine
//=========================================================================

/// Single-qubit channel with Kraus operators derived on demand.
class NoiseChannel {
 public:
  enum class Kind { Dephasing, Depolarizing };

  /// Phase damping for `duration` at coherence time `t2`: off-diagonals scale
  /// by exp(-duration / t2).
  static NoiseChannel dephasing(Real t2, Real duration);
  /// rho -> (1 - p) rho + p I/2.
  static NoiseChannel depolarizing(Real probability);
  static NoiseChannel from_kraus(std::vector<ComplexMatrix> kraus);

  Kind kind() const { return kind_; }
  const std::vector<ComplexMatrix>& kraus() const { return kraus_; }

  /// max |sum K^dagger K - I|
  Real completeness_defect() const;

 private:
  NoiseChannel(Kind kind, std::vector<ComplexMatrix> kraus);

  Kind kind_;
  std::vector<ComplexMatrix> kraus_;
};

/// Dephasing with per-qubit T2* acting during a total duration that is split
/// evenly over the gates of a circuit, plus a depolarizing pulse error applied
/// to every qubit once at the end.
struct NoiseSchedule {
  std::vector<Real> t2_star;  // per qubit; empty means no dephasing
  Real total_duration = 0;
  Real depolarizing_probability = 0;

  bool active() const {
    return (!t2_star.empty() && total_duration > 0) || depolarizing_probability > 0;
  }
};

DensityMatrix apply_gate(const DensityMatrix& rho, const Gate& g);
DensityMatrix apply_channel(const DensityMatrix& rho, const NoiseChannel& channel, int qubit);
DensityMatrix evolve_density(const DensityMatrix& rho, const Circuit& c,
                             const std::optional<NoiseSchedule>& noise = std::nullopt);

//=========================================================================
// Measurement
//=========================================================================

template <typename State>
struct MeasurementOutcome {
  Real probability = 0;
  State state;
};

/// Projects qubit `q` onto `outcome` and renormalizes. Throws
/// ZeroProbabilityBranch when the branch probability is below 1e-14.
MeasurementOutcome<PureState> measure_qubit(const PureState& state, int q, int outcome);
MeasurementOutcome<DensityMatrix> measure_qubit(const DensityMatrix& rho, int q, int outcome);

//=========================================================================
// Text serialization
//=========================================================================

/// One gate per line, e.g.
///   cu targets=2 controls=0:1,1:0 matrix=re,im;re,im;...
/// Numbers are written with 17 significant digits so parsing restores them
/// exactly.
std::string serialize(const Circuit& c);
Circuit parse_circuit(const std::string& text);

}  // namespace qlsys
