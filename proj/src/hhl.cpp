/**
 * Copyright 2026, The qlsys authors.
 *
 * This source code and the accompanying materials are made available under
 * the terms of the Apache License 2.0.
 */

#include "qlsys/hhl.hpp"

#include <algorithm>
#include <cmath>

#include "qlsys/reference.hpp"

namespace qlsys::hhl {

namespace {

constexpr Real kLabelTol = 1e-9;

Eigen::Index clock_dim(const SolverConfig& cfg) { return Eigen::Index{1} << cfg.clock_qubits; }

std::vector<Control> clock_controls(const RegisterLayout& layout, long value) {
  std::vector<Control> out;
  for (int i = 0; i < layout.clock_qubits; ++i) {
    out.push_back({i, static_cast<int>((value >> (layout.clock_qubits - 1 - i)) & 1)});
  }
  return out;
}

long swap_label(long k) { return ((k & 1) << 1) | ((k >> 1) & 1); }

// Probability of each clock value for a [clock | rest] state.
RealVector clock_distribution(const ComplexVector& amps, int clock_qubits) {
  const Eigen::Index cdim = Eigen::Index{1} << clock_qubits;
  const Eigen::Index rest = amps.size() / cdim;
  RealVector p = RealVector::Zero(cdim);
  for (Eigen::Index c = 0; c < cdim; ++c) p(c) = amps.segment(c * rest, rest).squaredNorm();
  return p;
}

RealVector clock_distribution(const ComplexMatrix& rho, int clock_qubits) {
  const Eigen::Index cdim = Eigen::Index{1} << clock_qubits;
  const Eigen::Index rest = rho.rows() / cdim;
  RealVector p = RealVector::Zero(cdim);
  for (Eigen::Index c = 0; c < cdim; ++c) p(c) = rho.diagonal().segment(c * rest, rest).real().sum();
  return p;
}

// 1 - ||P psi||^2 with P = sum_j |label_j><label_j| (x) |u_j><u_j| (x) I_tail
// for a [clock | system | tail] state.
Real leakage_of(const ComplexVector& amps, const LinearSystem& sys, const SolverConfig& cfg,
                Eigen::Index tail_dim) {
  const auto enc = encode_eigenvalues(sys, cfg);
  const Eigen::Index ndim = sys.size();
  const Eigen::Index cdim = clock_dim(cfg);
  Real kept = 0;
  for (std::size_t j = 0; j < enc.size(); ++j) {
    const long label = ((enc[j].nearest % cdim) + cdim) % cdim;
    const ComplexVector u = sys.spectrum().eigenvectors.col(static_cast<Eigen::Index>(j));
    for (Eigen::Index a = 0; a < tail_dim; ++a) {
      Complex proj = 0;
      for (Eigen::Index b = 0; b < ndim; ++b) {
        proj += std::conj(u(b)) * amps((label * ndim + b) * tail_dim + a);
      }
      kept += std::norm(proj);
    }
  }
  return std::max(0.0, 1.0 - kept);
}

// Principal eigenvector of the reduced system state, aligned to `reference`.
std::pair<ComplexVector, Real> principal_solution(const DensityMatrix& reduced, const ComplexVector& reference) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(reduced.matrix());
  const Eigen::Index top = solver.eigenvalues().size() - 1;
  ComplexVector x = solver.eigenvectors().col(top);
  return {align_phase(x, reference), reduced.purity()};
}

}  // namespace

//-------------------------------------------------------------------------
// Inputs
//-------------------------------------------------------------------------

ComplexMatrix demo_matrix() {
  ComplexMatrix a(2, 2);
  a << 1.5, 0.5, 0.5, 1.5;
  return a;
}

PureState prepare_b(Real theta) {
  ComplexVector v(2);
  v << std::cos(theta / 2), std::sin(theta / 2);
  return PureState(std::move(v));
}

LinearSystem::LinearSystem(ComplexMatrix a, ComplexVector b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() != a_.cols()) throw Error(ErrorKind::DimensionMismatch, "A must be square");
  system_qubits_ = qubit_count_for_dimension(a_.rows());
  if (system_qubits_ < 1) throw Error(ErrorKind::DimensionMismatch, "A must be 2^n x 2^n with n >= 1");
  if (b_.size() != a_.rows()) throw Error(ErrorKind::DimensionMismatch, "b length differs from A");
  if (std::abs(b_.norm() - 1.0) > kStructuralTol) {
    throw Error(ErrorKind::NotNormalized, "|b| = " + std::to_string(b_.norm()));
  }
  spectrum_ = eig_hermitian(a_);
  if (!(spectrum_.min() > 0)) {
    throw Error(ErrorKind::NonPositiveEigenvalue,
                "lambda_min = " + std::to_string(spectrum_.min()) + "; only positive spectra are inverted");
  }
}

LinearSystem LinearSystem::demo(Real theta) { return LinearSystem(demo_matrix(), prepare_b(theta).amplitudes()); }

ComplexVector LinearSystem::normalized_solution() const {
  const ComplexVector x = reference::direct_solve(a_, b_);
  return canonicalize_phase(x / x.norm());
}

std::string_view to_string(RotationMode mode) {
  return mode == RotationMode::LinearApprox ? "linear" : "exact";
}

std::string_view to_string(InversionPath path) {
  switch (path) {
    case InversionPath::Auto: return "auto";
    case InversionPath::Swap: return "swap";
    case InversionPath::Direct: return "direct";
  }
  return "?";
}

std::vector<int> RegisterLayout::clock() const {
  std::vector<int> q(static_cast<std::size_t>(clock_qubits));
  for (int i = 0; i < clock_qubits; ++i) q[static_cast<std::size_t>(i)] = i;
  return q;
}

std::vector<int> RegisterLayout::system() const {
  std::vector<int> q(static_cast<std::size_t>(system_qubits));
  for (int i = 0; i < system_qubits; ++i) q[static_cast<std::size_t>(i)] = clock_qubits + i;
  return q;
}

RegisterLayout layout_for(const LinearSystem& sys, const SolverConfig& cfg) {
  return RegisterLayout{cfg.clock_qubits, sys.system_qubits()};
}

//-------------------------------------------------------------------------
// Configuration
//-------------------------------------------------------------------------

std::vector<EncodedEigenvalue> encode_eigenvalues(const LinearSystem& sys, const SolverConfig& cfg) {
  std::vector<EncodedEigenvalue> out;
  const long top = static_cast<long>(clock_dim(cfg)) - 1;
  for (Eigen::Index j = 0; j < sys.spectrum().size(); ++j) {
    EncodedEigenvalue e;
    e.lambda = sys.spectrum().eigenvalues(j);
    e.label = e.lambda * cfg.t0 / (2 * std::numbers::pi);
    e.nearest = std::lround(e.label);
    e.exact = std::abs(e.label - static_cast<Real>(e.nearest)) < kLabelTol && e.nearest >= 1 && e.nearest <= top;
    out.push_back(e);
  }
  return out;
}

void validate(const LinearSystem& sys, const SolverConfig& cfg) {
  if (cfg.clock_qubits < 1 || cfg.clock_qubits > 8) {
    throw Error(ErrorKind::InvalidArgument, "clock_qubits must be in [1, 8]");
  }
  if (cfg.r < 1) throw Error(ErrorKind::InvalidArgument, "r must be a positive integer");
  if (!(cfg.t0 > 0) || !std::isfinite(cfg.t0)) throw Error(ErrorKind::InvalidArgument, "t0 must be positive");
  if (cfg.exact_encoding) {
    for (const auto& e : encode_eigenvalues(sys, cfg)) {
      if (!e.exact) {
        throw Error(ErrorKind::EigenvalueNotEncodable,
                    "lambda = " + std::to_string(e.lambda) + " gives clock label " + std::to_string(e.label) +
                        " (need an integer in [1, " + std::to_string(clock_dim(cfg) - 1) + "])");
      }
    }
  }
  if (cfg.rotation_mode == RotationMode::ExactArcsin) {
    const Real c = c_tilde(sys, cfg);
    if (!(c > 0) || c > sys.spectrum().min() * (1 + 1e-12)) {
      throw Error(ErrorKind::InvalidArgument,
                  "ExactArcsin needs 0 < C <= lambda_min = " + std::to_string(sys.spectrum().min()));
    }
  }
  if (cfg.inversion == InversionPath::Swap && !swap_path_available(sys, cfg)) {
    throw Error(ErrorKind::SwapPathUnavailable,
                "lambda -> 2/lambda is not a permutation of the clock labels for this system");
  }
}

Real rotation_angle(Real lambda, const SolverConfig& cfg, Real c) {
  if (cfg.rotation_mode == RotationMode::LinearApprox) {
    return (2 * std::numbers::pi / std::ldexp(1.0, cfg.r)) / lambda;
  }
  return 2 * std::asin(std::min(1.0, c / lambda));
}

Real branch_amplitude(Real lambda, const SolverConfig& cfg, Real c) {
  return std::sin(rotation_angle(lambda, cfg, c) / 2);
}

Real c_tilde(const LinearSystem& sys, const SolverConfig& cfg) {
  if (cfg.rotation_mode == RotationMode::ExactArcsin) return cfg.c_tilde.value_or(sys.spectrum().min());
  Real acc = 0;
  const auto& ev = sys.spectrum().eigenvalues;
  for (Eigen::Index j = 0; j < ev.size(); ++j) acc += ev(j) * branch_amplitude(ev(j), cfg, 0);
  return acc / static_cast<Real>(ev.size());
}

//-------------------------------------------------------------------------
// Circuit stages
//-------------------------------------------------------------------------

std::vector<Gate> conditional_evolution(const LinearSystem& sys, const SolverConfig& cfg) {
  const auto layout = layout_for(sys, cfg);
  const Eigen::Index cdim = clock_dim(cfg);
  std::vector<Gate> gates;
  for (Eigen::Index tau = 0; tau < cdim; ++tau) {
    const Real time = static_cast<Real>(tau) * cfg.t0 / static_cast<Real>(cdim);
    gates.push_back(Gate::controlled(clock_controls(layout, static_cast<long>(tau)), layout.system(),
                                     matrix_exp_hermitian(sys.matrix(), time)));
  }
  return gates;
}

namespace {

Circuit preparation_circuit(const RegisterLayout& layout, int n_qubits) {
  Circuit c(n_qubits);
  for (int q : layout.clock()) c.add(Gate::hadamard(q));
  return c;
}

Circuit estimation_circuit(const LinearSystem& sys, const SolverConfig& cfg, int n_qubits) {
  Circuit c(n_qubits);
  for (auto& g : conditional_evolution(sys, cfg)) c.add(std::move(g));
  c.append(qft(cfg.clock_qubits, n_qubits, 0));
  return c;
}

bool use_swap_path(const LinearSystem& sys, const SolverConfig& cfg) {
  switch (cfg.inversion) {
    case InversionPath::Swap: return true;
    case InversionPath::Direct: return false;
    case InversionPath::Auto: return swap_path_available(sys, cfg);
  }
  return false;
}

}  // namespace

PhaseEstimate phase_estimate(const LinearSystem& sys, const SolverConfig& cfg, const PureState& b) {
  validate(sys, cfg);
  if (b.dimension() != sys.size()) throw Error(ErrorKind::DimensionMismatch, "b width differs from A");
  const auto layout = layout_for(sys, cfg);
  const int n = layout.clock_qubits + layout.system_qubits;
  Circuit c = preparation_circuit(layout, n);
  c.append(estimation_circuit(sys, cfg, n));
  const PureState in = tensor(PureState::basis(cfg.clock_qubits, 0), b);
  PureState out = run_circuit(in, c);
  const Real leak = leakage_of(out.amplitudes(), sys, cfg, 1);
  return {std::move(out), leak};
}

bool swap_path_available(const LinearSystem& sys, const SolverConfig& cfg) {
  if (cfg.clock_qubits != 2) return false;
  for (const auto& e : encode_eigenvalues(sys, cfg)) {
    if (!e.exact || swap_label(e.nearest) * e.nearest != 2) return false;
  }
  return true;
}

std::vector<Gate> eigenvalue_inversion_gates(const LinearSystem& sys, const SolverConfig& cfg) {
  validate(sys, cfg);
  const auto layout = layout_for(sys, cfg);
  const int anc = layout.ancilla();
  const Real c = c_tilde(sys, cfg);
  const Real label_to_lambda = 2 * std::numbers::pi / cfg.t0;
  std::vector<Gate> gates;

  if (use_swap_path(sys, cfg)) {
    if (!swap_path_available(sys, cfg)) {
      throw Error(ErrorKind::SwapPathUnavailable, "SWAP inversion needs t = 2 and labels in {1, 2}");
    }
    gates.push_back(Gate::swap(0, 1));
    if (cfg.rotation_mode == RotationMode::LinearApprox) {
      // After the SWAP the clock holds v = 2/k, so theta = (2 pi / 2^r) / lambda
      // is linear in v and splits into one controlled-Ry per clock bit.
      const Real per_unit = (2 * std::numbers::pi / std::ldexp(1.0, cfg.r)) / (2 * label_to_lambda);
      gates.push_back(Gate::controlled({{0, 1}}, {anc}, ry_matrix(2 * per_unit)));
      gates.push_back(Gate::controlled({{1, 1}}, {anc}, ry_matrix(per_unit)));
    } else {
      for (long v : {1L, 2L}) {
        const Real lambda = label_to_lambda * 2.0 / static_cast<Real>(v);
        gates.push_back(Gate::controlled(clock_controls(layout, v), {anc}, ry_matrix(rotation_angle(lambda, cfg, c))));
      }
    }
    return gates;
  }

  for (Eigen::Index k = 1; k < clock_dim(cfg); ++k) {
    const Real lambda = label_to_lambda * static_cast<Real>(k);
    const Real theta = rotation_angle(lambda, cfg, c);
    if (theta == 0) continue;
    gates.push_back(Gate::controlled(clock_controls(layout, static_cast<long>(k)), {anc}, ry_matrix(theta)));
  }
  return gates;
}

Circuit HhlCircuit::full() const {
  Circuit c = prepare;
  c.append(estimate);
  c.append(invert);
  c.append(uncompute);
  return c;
}

HhlCircuit build_circuit(const LinearSystem& sys, const SolverConfig& cfg) {
  validate(sys, cfg);
  const auto layout = layout_for(sys, cfg);
  const int n = layout.n_qubits();
  HhlCircuit h{layout, use_swap_path(sys, cfg), Circuit(n), Circuit(n), Circuit(n), Circuit(n)};

  h.prepare = preparation_circuit(layout, n);
  h.estimate = estimation_circuit(sys, cfg, n);
  for (auto& g : eigenvalue_inversion_gates(sys, cfg)) h.invert.add(std::move(g));

  if (h.swap_path) h.uncompute.add(Gate::swap(0, 1));
  Circuit steps_1_to_3 = h.prepare;
  steps_1_to_3.append(h.estimate);
  h.uncompute.append(steps_1_to_3.inverse());

  for (Circuit* c : {&h.prepare, &h.estimate, &h.invert, &h.uncompute}) {
    c->set_register("clock", layout.clock());
    c->set_register("b", layout.system());
    c->set_register("ancilla", {layout.ancilla()});
  }
  return h;
}

PureState initial_state(const LinearSystem& sys, const SolverConfig& cfg) {
  return tensor(tensor(PureState::basis(cfg.clock_qubits, 0), PureState(sys.rhs())), PureState::basis(1, 0));
}

//-------------------------------------------------------------------------
// Runs
//-------------------------------------------------------------------------

namespace {

bool all_exact(const LinearSystem& sys, const SolverConfig& cfg) {
  const auto enc = encode_eigenvalues(sys, cfg);
  return std::all_of(enc.begin(), enc.end(), [](const auto& e) { return e.exact; });
}

void finish_report(SolveReport& report, const LinearSystem& sys, const DensityMatrix& post_selected,
                   const RegisterLayout& layout) {
  const auto system = layout.system();
  const DensityMatrix reduced = partial_trace(post_selected, system);
  report.x_classical = sys.normalized_solution();
  auto [x, purity] = principal_solution(reduced, report.x_classical);
  report.x_quantum = std::move(x);
  report.solution_purity = purity;
  report.overlap = std::abs(report.x_classical.dot(report.x_quantum));
  try {
    report.max_rel_error = max_relative_error(report.x_quantum, report.x_classical);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ZeroReferenceComponent) throw;
  }
}

}  // namespace

SolveReport run_hhl(const LinearSystem& sys, const SolverConfig& cfg) {
  const HhlCircuit h = build_circuit(sys, cfg);
  SolveReport report;
  report.swap_path = h.swap_path;
  report.c_tilde = c_tilde(sys, cfg);

  PureState s = initial_state(sys, cfg);
  const std::pair<const char*, const Circuit*> stages[] = {
      {"prepare", &h.prepare}, {"estimate", &h.estimate}, {"invert", &h.invert}, {"uncompute", &h.uncompute}};
  for (const auto& [name, circuit] : stages) {
    s = run_circuit(s, *circuit);
    report.snapshots.push_back({name, clock_distribution(s.amplitudes(), cfg.clock_qubits)});
    if (circuit == &h.estimate) {
      report.phase_estimation_leakage = leakage_of(s.amplitudes(), sys, cfg, 2);
    }
  }
  report.clock_residual = 1.0 - report.snapshots.back().clock_probabilities(0);
  report.final_state = DensityMatrix::from_pure(s);
  if (all_exact(sys, cfg)) {
    report.fidelity_4q = fidelity(report.final_state, DensityMatrix::from_pure(theoretical_final_state(sys, cfg)));
  }

  auto measured = measure_qubit(s, h.layout.ancilla(), 1);
  report.success_probability = measured.probability;
  finish_report(report, sys, DensityMatrix::from_pure(measured.state), h.layout);
  return report;
}

SolveReport run_hhl(const LinearSystem& sys, const SolverConfig& cfg, const NoiseSchedule& noise) {
  const HhlCircuit h = build_circuit(sys, cfg);
  SolveReport report;
  report.swap_path = h.swap_path;
  report.c_tilde = c_tilde(sys, cfg);

  const Circuit* stages[] = {&h.prepare, &h.estimate, &h.invert, &h.uncompute};
  const char* names[] = {"prepare", "estimate", "invert", "uncompute"};
  std::size_t total_gates = 0;
  for (const Circuit* c : stages) total_gates += c->size();

  DensityMatrix rho = DensityMatrix::from_pure(initial_state(sys, cfg));
  for (std::size_t i = 0; i < 4; ++i) {
    NoiseSchedule slice = noise;
    slice.total_duration = total_gates == 0 ? 0
                                            : noise.total_duration * static_cast<Real>(stages[i]->size()) /
                                                  static_cast<Real>(total_gates);
    if (i + 1 < 4) slice.depolarizing_probability = 0;
    rho = evolve_density(rho, *stages[i], slice);
    report.snapshots.push_back({names[i], clock_distribution(rho.matrix(), cfg.clock_qubits)});
  }
  report.clock_residual = 1.0 - report.snapshots.back().clock_probabilities(0);
  report.final_state = rho;
  if (all_exact(sys, cfg)) {
    report.fidelity_4q = fidelity(rho, DensityMatrix::from_pure(theoretical_final_state(sys, cfg)));
  }

  auto measured = measure_qubit(rho, h.layout.ancilla(), 1);
  report.success_probability = measured.probability;
  finish_report(report, sys, measured.state, h.layout);
  return report;
}

namespace {

PureState assemble_branches(const LinearSystem& sys, const SolverConfig& cfg, bool before_uncompute) {
  validate(sys, cfg);
  const auto enc = encode_eigenvalues(sys, cfg);
  for (const auto& e : enc) {
    if (!e.exact) throw Error(ErrorKind::EigenvalueNotEncodable, "theoretical state needs exact encoding");
  }
  const bool swapped = use_swap_path(sys, cfg);
  const Real c = c_tilde(sys, cfg);
  const ComplexVector beta = sys.eigen_coefficients();
  const Eigen::Index cdim = clock_dim(cfg);
  const Eigen::Index ndim = sys.size();

  ComplexVector out = ComplexVector::Zero(cdim * ndim * 2);
  for (std::size_t j = 0; j < enc.size(); ++j) {
    const Real a = branch_amplitude(enc[j].lambda, cfg, c);
    long label = 0;
    if (before_uncompute) label = swapped ? swap_label(enc[j].nearest) : enc[j].nearest;
    ComplexVector clock = ComplexVector::Zero(cdim);
    clock(label) = 1;
    ComplexVector anc(2);
    anc << std::sqrt(std::max(0.0, 1 - a * a)), a;
    const ComplexVector u = sys.spectrum().eigenvectors.col(static_cast<Eigen::Index>(j));
    out += beta(static_cast<Eigen::Index>(j)) * kron(kron(clock, u), anc);
  }
  return PureState(std::move(out));
}

}  // namespace

PureState theoretical_final_state(const LinearSystem& sys, const SolverConfig& cfg) {
  return assemble_branches(sys, cfg, false);
}

PureState theoretical_rotated_state(const LinearSystem& sys, const SolverConfig& cfg) {
  return assemble_branches(sys, cfg, true);
}

//-------------------------------------------------------------------------
// Metrics
//-------------------------------------------------------------------------

Real max_relative_error(const ComplexVector& x_exp, const ComplexVector& x_theory) {
  if (x_exp.size() != x_theory.size()) throw Error(ErrorKind::DimensionMismatch, "solution lengths differ");
  const ComplexVector aligned = align_phase(x_exp, x_theory);
  Real worst = 0;
  for (Eigen::Index i = 0; i < x_theory.size(); ++i) {
    const Real ref = std::abs(x_theory(i));
    if (ref < 1e-12) {
      throw Error(ErrorKind::ZeroReferenceComponent, "x_theory[" + std::to_string(i) + "] is zero");
    }
    worst = std::max(worst, std::abs(aligned(i) - x_theory(i)) / ref);
  }
  return worst;
}

Real probability_ratio(const ComplexVector& x) {
  if (x.size() != 2) throw Error(ErrorKind::DimensionMismatch, "probability_ratio needs two components");
  if (std::norm(x(1)) < 1e-300) throw Error(ErrorKind::ZeroReferenceComponent, "x_2 is zero");
  return std::norm(x(0)) / std::norm(x(1));
}

std::vector<SweepRow> sweep_r(const LinearSystem& sys, const SolverConfig& base, std::span<const int> r_values) {
  std::vector<SweepRow> rows;
  for (int r : r_values) {
    SolverConfig cfg = base;
    cfg.r = r;
    const auto report = run_hhl(sys, cfg);
    rows.push_back({static_cast<Real>(r), report.max_rel_error, report.success_probability,
                    report.phase_estimation_leakage});
  }
  return rows;
}

std::vector<SweepRow> sweep_t0(const LinearSystem& sys, const SolverConfig& base, std::span<const Real> t0_values) {
  std::vector<SweepRow> rows;
  for (Real t0 : t0_values) {
    SolverConfig cfg = base;
    cfg.t0 = t0;
    cfg.exact_encoding = false;
    if (!swap_path_available(sys, cfg)) cfg.inversion = InversionPath::Direct;
    const auto report = run_hhl(sys, cfg);
    rows.push_back({t0, report.max_rel_error, report.success_probability, report.phase_estimation_leakage});
  }
  return rows;
}

}  // namespace qlsys::hhl
