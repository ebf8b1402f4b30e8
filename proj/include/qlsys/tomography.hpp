/**
 * Copyright 2026, The qlsys authors.
 *
 * This source code and the accompanying materials are made available under
 * the terms of the Apache License 2.0.
 */

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qlsys/nmr.hpp"
#include "qlsys/qcore.hpp"

namespace qlsys::tomo {

/// A readout sequence such as "YEEE*SWAP13". Factors multiply as operators,
/// so the rightmost factor acts first. E is the identity, X and Y are pi/2
/// rotations about x and y, SWAPij exchanges qubits i and j (1-based).
struct ReadoutPulse {
  std::string name;
  ComplexMatrix op;  // 16 x 16
};

/// Parses a pulse name (case-insensitive). Throws InvalidArgument.
ReadoutPulse make_pulse(const std::string& name);

enum class CatalogKind { Full, Partial };

/// Full: the 44-pulse tomography set. Partial: YEEE, YEEE*SWAP12,
/// YEEE*SWAP13, YEEE*SWAP14, XEEE*SWAP13.
std::vector<ReadoutPulse> pulse_catalog(CatalogKind kind);

struct MeasurementRecord {
  std::string pulse;
  RealVector populations;  // diagonal of U rho U^dagger
  ComplexVector peaks;     // carbon lines 2 (U rho U^dagger)_{s, s+8}, s = 0..7
};

std::vector<MeasurementRecord> simulate_readout(const DensityMatrix& rho, const std::vector<ReadoutPulse>& pulses);

/// Adds independent N(0, sigma^2) noise to the real and imaginary part of every
/// peak. Populations are left untouched.
void add_readout_noise(std::vector<MeasurementRecord>& records, Real sigma, std::uint64_t seed);

/// Replaces every peak amplitude by the intensity recovered from a Lorentzian
/// fit of the synthesized carbon spectrum (real and imaginary channels fitted
/// separately).
void refit_peaks(std::vector<MeasurementRecord>& records, const nmr::MoleculeParams& params, int n_points = 4001);

/// Rank of the linear map from the 256 real parameters of a Hermitian 16 x 16
/// matrix to the peak observables of `pulses` (plus the trace).
int observable_rank(const std::vector<ReadoutPulse>& pulses);

/// Rank of the map from the 16 populations to the real peak parts of the first
/// four partial pulses (plus the trace).
int partial_population_rank();

/// Linear inversion over the record observables followed by projection onto
/// the physical states. Throws InsufficientRecords when the records do not
/// determine the state.
DensityMatrix reconstruct_density(const std::vector<MeasurementRecord>& records);

struct PartialSolution {
  Real c_sq = 0;   // population of |0001>
  Real d_sq = 0;   // population of |0011>
  Real re_cd = 0;  // Re(c d*)
  int phase_sign = 0;

  /// |c/d|^2. Throws SubspaceMassTooSmall when d_sq < 1e-10.
  Real ratio() const;
  /// (|c|, sign |d|) normalized. Throws SubspaceMassTooSmall.
  RealVector solution() const;
};

/// Throws InsufficientRecords if a partial pulse is missing and
/// SubspaceMassTooSmall when |c|^2 + |d|^2 < 1e-10.
PartialSolution extract_solution_partial(const std::vector<MeasurementRecord>& records);

std::string records_to_json(const std::vector<MeasurementRecord>& records);
/// Throws ConfigParseError.
std::vector<MeasurementRecord> records_from_json(const std::string& text);

}  // namespace qlsys::tomo
