/**
 * Copyright 2026, The qlsys authors.
 *
 * This source code and the accompanying materials are made available under
 * the terms of the Apache License 2.0.
 */

#pragma once

#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qlsys/circuit.hpp"
#include "qlsys/qcore.hpp"

namespace qlsys::hhl {

/// A = (1/2)[[3, 1], [1, 3]], eigenvalues 1 and 2.
ComplexMatrix demo_matrix();

/// cos(theta/2)|0> + sin(theta/2)|1>
PureState prepare_b(Real theta);

/// Hermitian positive-definite A of size 2^n with unit right-hand side b.
class LinearSystem {
 public:
  LinearSystem(ComplexMatrix a, ComplexVector b);

  /// demo_matrix() with b = prepare_b(theta).
  static LinearSystem demo(Real theta);

  const ComplexMatrix& matrix() const { return a_; }
  const ComplexVector& rhs() const { return b_; }
  const Spectrum& spectrum() const { return spectrum_; }
  Real condition_number() const { return spectrum_.condition_number(); }
  Eigen::Index size() const { return a_.rows(); }
  int system_qubits() const { return system_qubits_; }

  /// beta_j = <u_j|b>
  ComplexVector eigen_coefficients() const { return spectrum_.eigenvectors.adjoint() * b_; }

  /// A^{-1} b normalized and phase-canonicalized, from the direct solver.
  ComplexVector normalized_solution() const;

 private:
  ComplexMatrix a_;
  ComplexVector b_;
  Spectrum spectrum_;
  int system_qubits_ = 0;
};

enum class RotationMode {
  LinearApprox,  // theta_j = (2 pi / 2^r) / lambda_j
  ExactArcsin,   // theta_j = 2 asin(C / lambda_j)
};

enum class InversionPath {
  Auto,    // SWAP relabeling when it is a valid clock permutation, else direct
  Swap,    // |lambda> -> |2/lambda> by a SWAP of the two clock qubits
  Direct,  // one fully controlled rotation per clock value
};

std::string_view to_string(RotationMode mode);
std::string_view to_string(InversionPath path);

struct SolverConfig {
  int clock_qubits = 2;
  Real t0 = 2 * std::numbers::pi;
  int r = 2;
  RotationMode rotation_mode = RotationMode::LinearApprox;
  /// Normalization constant for ExactArcsin; defaults to lambda_min.
  std::optional<Real> c_tilde;
  InversionPath inversion = InversionPath::Auto;
  /// Require every lambda_j t0 / 2 pi to be an integer clock label.
  bool exact_encoding = true;
};

/// Qubit roles: [clock | system | ancilla], clock qubit 0 most significant.
struct RegisterLayout {
  int clock_qubits = 0;
  int system_qubits = 0;

  int n_qubits() const { return clock_qubits + system_qubits + 1; }
  int ancilla() const { return clock_qubits + system_qubits; }
  std::vector<int> clock() const;
  std::vector<int> system() const;
};

RegisterLayout layout_for(const LinearSystem& sys, const SolverConfig& cfg);

/// lambda_j t0 / 2 pi and its nearest integer clock label.
struct EncodedEigenvalue {
  Real lambda = 0;
  Real label = 0;
  long nearest = 0;
  bool exact = false;
};

std::vector<EncodedEigenvalue> encode_eigenvalues(const LinearSystem& sys, const SolverConfig& cfg);

/// Throws EigenvalueNotEncodable (exact mode) or InvalidArgument on an
/// inconsistent config.
void validate(const LinearSystem& sys, const SolverConfig& cfg);

/// C used by ExactArcsin (configured or lambda_min). For LinearApprox this is
/// the diagnostic mean over j of lambda_j sin(theta_j / 2), never an input.
Real c_tilde(const LinearSystem& sys, const SolverConfig& cfg);

/// Ancilla rotation angle for eigenvalue `lambda`.
Real rotation_angle(Real lambda, const SolverConfig& cfg, Real c);
/// Amplitude sin(theta/2) left on the ancilla |1> branch.
Real branch_amplitude(Real lambda, const SolverConfig& cfg, Real c);

/// Sum over clock values tau of |tau><tau| (x) exp(-i A tau t0 / 2^t), one
/// controlled block per tau.
std::vector<Gate> conditional_evolution(const LinearSystem& sys, const SolverConfig& cfg);

struct PhaseEstimate {
  PureState state;        // clock (x) system
  Real leakage = 0;       // mass off sum_j |round(k_j)><..| (x) |u_j><u_j|
};

PhaseEstimate phase_estimate(const LinearSystem& sys, const SolverConfig& cfg, const PureState& b);

/// True when t = 2 and the SWAP maps every eigenvalue label k to 2/k.
bool swap_path_available(const LinearSystem& sys, const SolverConfig& cfg);

/// SWAP (if used) followed by the controlled ancilla rotations. Throws
/// SwapPathUnavailable when InversionPath::Swap is requested but invalid.
std::vector<Gate> eigenvalue_inversion_gates(const LinearSystem& sys, const SolverConfig& cfg);

struct HhlCircuit {
  RegisterLayout layout;
  bool swap_path = false;
  Circuit prepare;    // clock superposition
  Circuit estimate;   // conditional evolution + QFT
  Circuit invert;     // SWAP + controlled rotations
  Circuit uncompute;  // SWAP back, inverse QFT, inverse evolution, H

  Circuit full() const;
};

HhlCircuit build_circuit(const LinearSystem& sys, const SolverConfig& cfg);

/// |0..0>_clock (x) |b> (x) |0>_ancilla
PureState initial_state(const LinearSystem& sys, const SolverConfig& cfg);

struct RegisterSnapshot {
  std::string stage;
  RealVector clock_probabilities;
};

struct SolveReport {
  ComplexVector x_quantum;    // post-selected register-B state, phase-aligned
  ComplexVector x_classical;  // normalized direct solve
  Real success_probability = 0;
  std::optional<Real> fidelity_4q;     // vs theoretical_final_state
  std::optional<Real> max_rel_error;   // absent when a reference component is 0
  Real overlap = 0;                    // |<x_quantum|x_classical>|
  Real clock_residual = 0;             // mass off clock |0..0> after uncompute
  Real solution_purity = 1;
  Real phase_estimation_leakage = 0;
  Real c_tilde = 0;
  bool swap_path = false;
  std::vector<RegisterSnapshot> snapshots;
  DensityMatrix final_state = DensityMatrix::maximally_mixed(1);  // before measurement
};

SolveReport run_hhl(const LinearSystem& sys, const SolverConfig& cfg);

/// Density-matrix run under `noise`, starting from the pure input state.
SolveReport run_hhl(const LinearSystem& sys, const SolverConfig& cfg, const NoiseSchedule& noise);

/// Ideal output after uncompute:
///   sum_j beta_j (sqrt(1 - a_j^2)|0> + a_j|1>)_anc |0..0>_clock |u_j>
/// with a_j = C/lambda_j (ExactArcsin) or sin(theta_j/2) (LinearApprox).
PureState theoretical_final_state(const LinearSystem& sys, const SolverConfig& cfg);

/// Same amplitudes before uncompute, with the clock holding the label the
/// rotations are conditioned on (|lambda_j>, or |2/lambda_j> on the SWAP path).
PureState theoretical_rotated_state(const LinearSystem& sys, const SolverConfig& cfg);

/// max_i |x_exp_i - x_theory_i| / |x_theory_i| after aligning the global
/// phase of x_exp to x_theory. Throws ZeroReferenceComponent.
Real max_relative_error(const ComplexVector& x_exp, const ComplexVector& x_theory);

/// |x_1 / x_2|^2 for a two-component solution.
Real probability_ratio(const ComplexVector& x);

struct SweepRow {
  Real parameter = 0;  // r or t0
  std::optional<Real> max_rel_error;
  Real success_probability = 0;
  Real leakage = 0;
};

std::vector<SweepRow> sweep_r(const LinearSystem& sys, const SolverConfig& base, std::span<const int> r_values);

/// t0 sweep; exact encoding is relaxed so off-grid t0 values report leakage.
std::vector<SweepRow> sweep_t0(const LinearSystem& sys, const SolverConfig& base, std::span<const Real> t0_values);

}  // namespace qlsys::hhl
