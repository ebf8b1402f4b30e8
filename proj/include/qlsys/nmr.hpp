/**
 * Copyright 2026, The qlsys authors.
 *
 * This source code and the accompanying materials are made available under
 * the terms of the Apache License 2.0.
 */

#pragma once

#include <array>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qlsys/qcore.hpp"

namespace qlsys::nmr {

/// Qubit order of the four-spin register: 13C is qubit 0 (the observed
/// channel), then the three 19F nuclei.
enum class Nucleus { C = 0, F1 = 1, F2 = 2, F3 = 3 };

std::string_view to_string(Nucleus n);

inline constexpr Real kReferenceTemperature = 303.0;
inline constexpr Real kCalibrationLow = 293.0;
inline constexpr Real kCalibrationHigh = 313.0;

/// Fluorine shift in Hz from the fitted linear temperature law
///   w = w_303 + slope (T - 303.0).
/// Throws OutOfCalibrationRange outside [293, 313] K and InvalidArgument for
/// the carbon nucleus, whose shift has no fitted drift.
Real chemical_shift(Nucleus nucleus, Real temperature_k);

struct MoleculeParams {
  std::array<Real, 4> shift_hz{};        // at 303.0 K, indexed by Nucleus
  std::array<Real, 4> drift_hz_per_k{};  // d shift / dT
  std::array<Real, 4> t2_star_ms{};
  std::array<std::array<Real, 4>, 4> j_hz{};  // symmetric, diagonal unused
  Real temperature_k = kReferenceTemperature;
  Real linewidth_hz = 1.0;

  /// Fluorine shifts and drifts are the calibrated values; the carbon shift,
  /// the J couplings and T2* are placeholders to be replaced by measured
  /// values. The C-F couplings order the four solution peaks p1-p9, p0-p8,
  /// p3-p11, p2-p10 from high to low frequency.
  static MoleculeParams defaults();

  void validate() const;
  Real shift_at(Nucleus n) const;
};

/// (1 - eps)/16 I + eps |0000><0000|, eps in [0, 1].
DensityMatrix pps_state(Real epsilon, int n_qubits = 4);

struct Peak {
  Real center_hz = 0;
  Real intensity = 0;
  Real linewidth_hz = 1;  // full width at half maximum
  int subspace = 0;       // basis label s of qubits 1..3 (F1 F2 F3)
  std::string label;      // "p{s}-p{s+8}"
};

/// Height-normalized Lorentzian: intensity * h^2 / ((f - center)^2 + h^2),
/// h = width / 2.
Real lorentzian(Real f, Real center, Real intensity, Real width);

struct Spectrum {
  std::vector<Peak> peaks;

  Real evaluate(Real f) const;
  std::vector<std::pair<Real, Real>> sample(Real f_min, Real f_max, int n_points) const;
  /// Lowest/highest peak center padded by `margin_widths` linewidths.
  std::pair<Real, Real> window(Real margin_widths = 10) const;
};

/// Frequencies of the eight carbon lines, one per F-spin configuration s.
std::array<Real, 8> carbon_line_frequencies(const MoleculeParams& params);

/// 13C spectrum after a gradient and a pi/2 readout: line s has intensity
/// p_s - p_{s+8}.
Spectrum synthesize_spectrum(const DensityMatrix& rho, const MoleculeParams& params);

/// Complex carbon-channel line amplitudes 2 rho_{s, s+8}, observed without a
/// readout pulse. Real parts reproduce synthesize_spectrum after a pi/2 y
/// rotation of the carbon.
ComplexVector carbon_signal(const DensityMatrix& rho);

/// CSV "frequency_hz,amplitude" with LF line endings.
std::string spectrum_csv(const std::vector<std::pair<Real, Real>>& samples);

//=========================================================================
// Lorentzian least squares
//=========================================================================

struct LorentzianPeak {
  Real center = 0;
  Real intensity = 0;
  Real width = 1;
};

struct FitResult {
  std::vector<LorentzianPeak> peaks;  // ordered by center
  int iterations = 0;
  Real residual_norm = 0;
  Real relative_residual = 0;  // ||r|| / ||y||
};

struct FitOptions {
  int max_iterations = 200;
  Real tolerance = 1e-8;
};

/// Damped least squares (Levenberg-Marquardt) with an analytic Jacobian.
/// Throws FitDiverged when it does not settle within `max_iterations`.
FitResult lorentzian_fit(std::span<const Real> freq, std::span<const Real> amplitude,
                         std::vector<LorentzianPeak> initial, const FitOptions& options = {});

/// Same, seeded from the `n_peaks` strongest local extrema of |amplitude|.
FitResult lorentzian_fit(std::span<const Real> freq, std::span<const Real> amplitude, int n_peaks,
                         const FitOptions& options = {});

}  // namespace qlsys::nmr
