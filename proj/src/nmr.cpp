/**
 * Copyright 2026, The qlsys authors.
 *
 * This source code and the accompanying materials are made available under
 * the terms of the Apache License 2.0.
 */

#include "qlsys/nmr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace qlsys::nmr {

std::string_view to_string(Nucleus n) {
  switch (n) {
    case Nucleus::C: return "C";
    case Nucleus::F1: return "F1";
    case Nucleus::F2: return "F2";
    case Nucleus::F3: return "F3";
  }
  return "?";
}

namespace {

// Fitted temperature laws for the fluorine shifts.
constexpr std::array<Real, 4> kShiftAt303 = {0.0, -33122.4, -42677.7, -56445.8};
constexpr std::array<Real, 4> kDriftPerKelvin = {0.0, -3.0, -1.3, 1.6};

std::size_t idx(Nucleus n) { return static_cast<std::size_t>(n); }

}  // namespace

Real chemical_shift(Nucleus nucleus, Real temperature_k) {
  if (nucleus == Nucleus::C) {
    throw Error(ErrorKind::InvalidArgument, "no calibrated temperature law for the carbon shift");
  }
  if (!(temperature_k >= kCalibrationLow && temperature_k <= kCalibrationHigh)) {
    throw Error(ErrorKind::OutOfCalibrationRange,
                "T = " + std::to_string(temperature_k) + " K outside [293, 313] K");
  }
  return kShiftAt303[idx(nucleus)] + kDriftPerKelvin[idx(nucleus)] * (temperature_k - kReferenceTemperature);
}

MoleculeParams MoleculeParams::defaults() {
  MoleculeParams p;
  p.shift_hz = kShiftAt303;
  p.drift_hz_per_k = kDriftPerKelvin;
  p.t2_star_ms = {500.0, 500.0, 500.0, 500.0};
  const Real j_cf1 = 280.0, j_cf2 = 90.0, j_cf3 = -40.0;
  const Real j_f1f2 = 70.0, j_f1f3 = 50.0, j_f2f3 = -120.0;
  p.j_hz = {{{0, j_cf1, j_cf2, j_cf3}, {j_cf1, 0, j_f1f2, j_f1f3}, {j_cf2, j_f1f2, 0, j_f2f3}, {j_cf3, j_f1f3, j_f2f3, 0}}};
  return p;
}

void MoleculeParams::validate() const {
  for (Real t2 : t2_star_ms) {
    if (!(t2 > 0)) throw Error(ErrorKind::InvalidArgument, "T2* must be positive");
  }
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t k = 0; k < 4; ++k) {
      if (j_hz[i][k] != j_hz[k][i]) throw Error(ErrorKind::InvalidArgument, "J table must be symmetric");
    }
  }
  if (!(linewidth_hz > 0)) throw Error(ErrorKind::InvalidArgument, "linewidth must be positive");
}

Real MoleculeParams::shift_at(Nucleus n) const {
  return shift_hz[idx(n)] + drift_hz_per_k[idx(n)] * (temperature_k - kReferenceTemperature);
}

DensityMatrix pps_state(Real epsilon, int n_qubits) {
  if (!(epsilon >= 0 && epsilon <= 1)) throw Error(ErrorKind::InvalidArgument, "polarization outside [0, 1]");
  const auto dim = Eigen::Index{1} << n_qubits;
  ComplexMatrix rho = ComplexMatrix::Identity(dim, dim) * ((1 - epsilon) / static_cast<Real>(dim));
  rho(0, 0) += epsilon;
  return DensityMatrix(std::move(rho));
}

//-------------------------------------------------------------------------
// Spectra
//-------------------------------------------------------------------------

Real lorentzian(Real f, Real center, Real intensity, Real width) {
  const Real h = width / 2;
  const Real d = f - center;
  return intensity * h * h / (d * d + h * h);
}

Real Spectrum::evaluate(Real f) const {
  Real y = 0;
  for (const auto& p : peaks) y += lorentzian(f, p.center_hz, p.intensity, p.linewidth_hz);
  return y;
}

std::vector<std::pair<Real, Real>> Spectrum::sample(Real f_min, Real f_max, int n_points) const {
  if (n_points < 2 || !(f_max > f_min)) throw Error(ErrorKind::InvalidArgument, "bad sampling grid");
  std::vector<std::pair<Real, Real>> out;
  out.reserve(static_cast<std::size_t>(n_points));
  const Real step = (f_max - f_min) / (n_points - 1);
  for (int i = 0; i < n_points; ++i) {
    const Real f = f_min + step * i;
    out.emplace_back(f, evaluate(f));
  }
  return out;
}

std::pair<Real, Real> Spectrum::window(Real margin_widths) const {
  if (peaks.empty()) return {-1, 1};
  Real lo = peaks.front().center_hz, hi = lo, width = 0;
  for (const auto& p : peaks) {
    lo = std::min(lo, p.center_hz);
    hi = std::max(hi, p.center_hz);
    width = std::max(width, p.linewidth_hz);
  }
  return {lo - margin_widths * width, hi + margin_widths * width};
}

std::array<Real, 8> carbon_line_frequencies(const MoleculeParams& params) {
  std::array<Real, 8> f{};
  const Real base = params.shift_at(Nucleus::C);
  for (int s = 0; s < 8; ++s) {
    Real v = base;
    for (int k = 1; k <= 3; ++k) {
      const bool up = ((s >> (3 - k)) & 1) == 0;
      v += (up ? 0.5 : -0.5) * params.j_hz[0][static_cast<std::size_t>(k)];
    }
    f[static_cast<std::size_t>(s)] = v;
  }
  return f;
}

Spectrum synthesize_spectrum(const DensityMatrix& rho, const MoleculeParams& params) {
  if (rho.n_qubits() != 4) throw Error(ErrorKind::DimensionMismatch, "carbon spectrum needs a 4-qubit state");
  params.validate();
  const auto freq = carbon_line_frequencies(params);
  const RealVector p = rho.populations();
  Spectrum out;
  for (int s = 0; s < 8; ++s) {
    Peak peak;
    peak.center_hz = freq[static_cast<std::size_t>(s)];
    peak.intensity = p(s) - p(s + 8);
    peak.linewidth_hz = params.linewidth_hz;
    peak.subspace = s;
    peak.label = "p" + std::to_string(s) + "-p" + std::to_string(s + 8);
    out.peaks.push_back(std::move(peak));
  }
  return out;
}

ComplexVector carbon_signal(const DensityMatrix& rho) {
  if (rho.n_qubits() != 4) throw Error(ErrorKind::DimensionMismatch, "carbon signal needs a 4-qubit state");
  ComplexVector out(8);
  for (Eigen::Index s = 0; s < 8; ++s) out(s) = 2.0 * rho.matrix()(s, s + 8);
  return out;
}

std::string spectrum_csv(const std::vector<std::pair<Real, Real>>& samples) {
  std::string out = "frequency_hz,amplitude\n";
  char buf[64];
  for (const auto& [f, y] : samples) {
    auto end = std::to_chars(buf, buf + sizeof(buf), f).ptr;
    *end++ = ',';
    end = std::to_chars(end, buf + sizeof(buf), y).ptr;
    *end++ = '\n';
    out.append(buf, end);
  }
  return out;
}

//-------------------------------------------------------------------------
// Lorentzian least squares
//-------------------------------------------------------------------------

namespace {

void evaluate_model(std::span<const Real> freq, const RealVector& params, RealVector& model, RealMatrix* jac) {
  const Eigen::Index m = static_cast<Eigen::Index>(freq.size());
  const Eigen::Index n_peaks = params.size() / 3;
  model.setZero(m);
  if (jac) jac->setZero(m, params.size());
  for (Eigen::Index k = 0; k < n_peaks; ++k) {
    const Real c = params(3 * k), a = params(3 * k + 1), w = params(3 * k + 2);
    const Real h = w / 2;
    for (Eigen::Index i = 0; i < m; ++i) {
      const Real d = freq[static_cast<std::size_t>(i)] - c;
      const Real den = d * d + h * h;
      const Real g = h * h / den;
      model(i) += a * g;
      if (jac) {
        (*jac)(i, 3 * k) = a * 2 * h * h * d / (den * den);
        (*jac)(i, 3 * k + 1) = g;
        (*jac)(i, 3 * k + 2) = a * h * d * d / (den * den);
      }
    }
  }
}

bool widths_positive(const RealVector& params) {
  for (Eigen::Index k = 2; k < params.size(); k += 3) {
    if (!(params(k) > 0)) return false;
  }
  return params.allFinite();
}

}  // namespace

FitResult lorentzian_fit(std::span<const Real> freq, std::span<const Real> amplitude,
                         std::vector<LorentzianPeak> initial, const FitOptions& options) {
  if (freq.size() != amplitude.size()) throw Error(ErrorKind::DimensionMismatch, "freq/amplitude lengths");
  if (initial.empty()) throw Error(ErrorKind::InvalidArgument, "need at least one peak");
  if (freq.size() < 3 * initial.size()) throw Error(ErrorKind::InvalidArgument, "fewer samples than parameters");

  const Eigen::Index m = static_cast<Eigen::Index>(freq.size());
  const RealVector y = Eigen::Map<const RealVector>(amplitude.data(), m);
  RealVector params(3 * static_cast<Eigen::Index>(initial.size()));
  for (std::size_t k = 0; k < initial.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    params.segment(3 * i, 3) << initial[k].center, initial[k].intensity, initial[k].width;
  }
  if (!widths_positive(params)) throw Error(ErrorKind::InvalidArgument, "initial widths must be positive");

  const Real y_norm = std::max(y.norm(), std::numeric_limits<Real>::min());
  RealVector model;
  RealMatrix jac;
  evaluate_model(freq, params, model, &jac);
  Real cost = (y - model).squaredNorm();
  Real lambda = 1e-3;
  bool converged = false;
  int iter = 0;

  for (; iter < options.max_iterations && !converged; ++iter) {
    if (std::sqrt(cost) <= 1e-15 * y_norm) {
      converged = true;
      break;
    }
    const RealVector r = y - model;
    const RealMatrix jtj = jac.transpose() * jac;
    const RealVector jtr = jac.transpose() * r;
    const Real diag_floor = 1e-12 * std::max(jtj.diagonal().maxCoeff(), 1e-300);

    bool accepted = false;
    while (!accepted) {
      RealMatrix lhs = jtj;
      for (Eigen::Index i = 0; i < lhs.rows(); ++i) lhs(i, i) += lambda * std::max(jtj(i, i), diag_floor);
      const RealVector step = lhs.ldlt().solve(jtr);
      const RealVector trial = params + step;
      RealVector trial_model;
      Real trial_cost = std::numeric_limits<Real>::infinity();
      if (step.allFinite() && widths_positive(trial)) {
        evaluate_model(freq, trial, trial_model, nullptr);
        trial_cost = (y - trial_model).squaredNorm();
      }
      if (trial_cost < cost) {
        const Real rel_drop = (cost - trial_cost) / cost;
        const Real rel_step = step.norm() / std::max(params.norm(), 1e-300);
        params = trial;
        model = std::move(trial_model);
        cost = trial_cost;
        lambda = std::max(lambda / 3, 1e-12);
        accepted = true;
        if (rel_step < options.tolerance * 1e-4 || rel_drop < options.tolerance * 1e-4) converged = true;
      } else {
        lambda *= 4;
        if (lambda > 1e12) {
          // no descent direction left: stationary point
          converged = true;
          break;
        }
      }
    }
    if (accepted) evaluate_model(freq, params, model, &jac);
  }

  if (!converged || !params.allFinite()) {
    throw Error(ErrorKind::FitDiverged, "no convergence after " + std::to_string(iter) +
                                            " iterations, relative residual " +
                                            std::to_string(std::sqrt(cost) / y_norm));
  }

  FitResult out;
  out.iterations = iter;
  out.residual_norm = std::sqrt(cost);
  out.relative_residual = out.residual_norm / y_norm;
  for (Eigen::Index k = 0; k < params.size() / 3; ++k) {
    out.peaks.push_back({params(3 * k), params(3 * k + 1), params(3 * k + 2)});
  }
  std::sort(out.peaks.begin(), out.peaks.end(), [](const auto& a, const auto& b) { return a.center < b.center; });
  return out;
}

FitResult lorentzian_fit(std::span<const Real> freq, std::span<const Real> amplitude, int n_peaks,
                         const FitOptions& options) {
  if (n_peaks < 1) throw Error(ErrorKind::InvalidArgument, "n_peaks must be >= 1");
  if (freq.size() != amplitude.size() || freq.size() < 3) {
    throw Error(ErrorKind::DimensionMismatch, "freq/amplitude lengths");
  }
  const std::size_t m = freq.size();
  std::vector<std::size_t> extrema;
  for (std::size_t i = 0; i < m; ++i) {
    const Real v = std::abs(amplitude[i]);
    const Real left = i > 0 ? std::abs(amplitude[i - 1]) : -1;
    const Real right = i + 1 < m ? std::abs(amplitude[i + 1]) : -1;
    if (v > left && v >= right && v > 0) extrema.push_back(i);
  }
  std::sort(extrema.begin(), extrema.end(),
            [&](std::size_t a, std::size_t b) { return std::abs(amplitude[a]) > std::abs(amplitude[b]); });
  if (extrema.size() < static_cast<std::size_t>(n_peaks)) {
    throw Error(ErrorKind::InvalidArgument, "found " + std::to_string(extrema.size()) + " extrema for " +
                                                std::to_string(n_peaks) + " peaks");
  }

  const Real spacing = std::abs(freq[m - 1] - freq[0]) / static_cast<Real>(m - 1);
  std::vector<LorentzianPeak> initial;
  for (int k = 0; k < n_peaks; ++k) {
    const std::size_t i = extrema[static_cast<std::size_t>(k)];
    const Real half = std::abs(amplitude[i]) / 2;
    std::size_t lo = i, hi = i;
    while (lo > 0 && std::abs(amplitude[lo]) > half) --lo;
    while (hi + 1 < m && std::abs(amplitude[hi]) > half) ++hi;
    const Real width = std::max(std::abs(freq[hi] - freq[lo]), 2 * spacing);
    initial.push_back({freq[i], amplitude[i], width});
  }
  return lorentzian_fit(freq, amplitude, std::move(initial), options);
}

}  // namespace qlsys::nmr
