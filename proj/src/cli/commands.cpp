/**
 * Copyright 2026, The qlsys authors.
 *
 * This source code and the accompanying materials are made available under
 * the terms of the Apache License 2.0.
 */

#include <charconv>
#include <fstream>

#include <Eigen/Core>

#include "qlsys/cli.hpp"

namespace qlsys::cli {

namespace {

constexpr Real kBandLow = 0.90;
constexpr Real kBandHigh = 1.0;

std::string decimal(Real v) {
  char buf[32];
  const auto end = std::to_chars(buf, buf + sizeof(buf), v).ptr;
  return std::string(buf, end);
}

Json complex_vector_json(const ComplexVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
  return out;
}

Json real_vector_json(const RealVector& v) {
  return std::vector<Real>(v.data(), v.data() + v.size());
}

Json matrix_part_json(const ComplexMatrix& m, bool imag) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(imag ? m(i, k).imag() : m(i, k).real());
    out.push_back(std::move(row));
  }
  return out;
}

template <typename T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

hhl::SolveReport solve(const RunConfig& cfg, const hhl::LinearSystem& sys) {
  return cfg.noise.enabled ? hhl::run_hhl(sys, cfg.solver, cfg.noise_schedule()) : hhl::run_hhl(sys, cfg.solver);
}

Json peaks_json(const nmr::Spectrum& spec) {
  Json out = Json::array();
  for (const auto& p : spec.peaks) {
    out.push_back({{"label", p.label}, {"center_hz", p.center_hz}, {"intensity", p.intensity},
                   {"linewidth_hz", p.linewidth_hz}});
  }
  return out;
}

std::vector<std::pair<Real, Real>> sample_spectrum(const nmr::Spectrum& spec, int points) {
  const auto [lo, hi] = spec.window();
  return spec.sample(lo, hi, points);
}

Json fitted_peaks_json(const nmr::Spectrum& spec, const std::vector<std::pair<Real, Real>>& samples) {
  std::vector<Real> f, y;
  for (const auto& [x, v] : samples) {
    f.push_back(x);
    y.push_back(v);
  }
  std::vector<nmr::LorentzianPeak> initial;
  for (const auto& p : spec.peaks) initial.push_back({p.center_hz, spec.evaluate(p.center_hz), p.linewidth_hz});
  const auto fit = nmr::lorentzian_fit(f, y, std::move(initial));
  Json out = Json::array();
  for (const auto& p : fit.peaks) {
    out.push_back({{"center_hz", p.center}, {"intensity", p.intensity}, {"width_hz", p.width}});
  }
  return {{"peaks", std::move(out)}, {"iterations", fit.iterations}, {"relative_residual", fit.relative_residual}};
}

Artifact json_artifact(std::string name, const Json& j) { return {std::move(name), json_text(j)}; }

}  // namespace

std::string json_text(const Json& j) { return j.dump(2) + "\n"; }

Json error_json(std::string_view kind, std::string_view message) {
  Json inner;
  inner["kind"] = std::string(kind);
  inner["message"] = std::string(message);
  Json out;
  out["error"] = std::move(inner);
  return out;
}

CommandOutput cmd_solve(const RunConfig& cfg) {
  const auto sys = cfg.system();
  const auto rep = solve(cfg, sys);

  Json j;
  j["mode"] = std::string(hhl::to_string(cfg.solver.rotation_mode));
  j["noise"] = cfg.noise.enabled;
  j["x_quantum"] = complex_vector_json(rep.x_quantum);
  j["x_classical"] = complex_vector_json(rep.x_classical);
  j["probability_ratio"] = rep.x_quantum.size() == 2 ? Json(hhl::probability_ratio(rep.x_quantum)) : Json(nullptr);
  j["probability_ratio_classical"] =
      rep.x_classical.size() == 2 ? Json(hhl::probability_ratio(rep.x_classical)) : Json(nullptr);
  j["success_probability"] = rep.success_probability;
  j["fidelity_4q"] = optional_json(rep.fidelity_4q);
  j["max_rel_error"] = optional_json(rep.max_rel_error);
  j["overlap"] = rep.overlap;
  j["clock_residual"] = rep.clock_residual;
  j["solution_purity"] = rep.solution_purity;
  j["phase_estimation_leakage"] = rep.phase_estimation_leakage;
  j["c_tilde"] = rep.c_tilde;
  j["swap_path"] = rep.swap_path;
  Json snaps = Json::array();
  for (const auto& s : rep.snapshots) {
    snaps.push_back({{"stage", s.stage}, {"clock_probabilities", real_vector_json(s.clock_probabilities)}});
  }
  j["snapshots"] = std::move(snaps);

  CommandOutput out;
  if (rep.final_state.n_qubits() == 4) {
    // intensities relative to the p0-p8 line of the pseudo-pure state, which is 1
    const auto spec = nmr::synthesize_spectrum(rep.final_state, cfg.molecule);
    j["peaks"] = peaks_json(spec);
    out.artifacts.push_back({"spectrum.csv", nmr::spectrum_csv(sample_spectrum(spec, cfg.spectrum_points))});
  }
  out.artifacts.push_back({"circuit.txt", serialize(hhl::build_circuit(sys, cfg.solver).full())});
  out.summary = std::move(j);
  out.artifacts.insert(out.artifacts.begin(), json_artifact("report.json", out.summary));
  return out;
}

CommandOutput cmd_sweep(const RunConfig& cfg) {
  const auto sys = cfg.system();
  if (cfg.sweep.r_values.empty() && cfg.sweep.t0_values.empty()) {
    throw Error(ErrorKind::InvalidArgument, "sweep needs an r or t0 range");
  }
  std::string csv = "kind,parameter,max_rel_error,success_probability,leakage\n";
  Json rows = Json::array();
  auto emit = [&](const char* kind, const std::vector<hhl::SweepRow>& result) {
    for (const auto& row : result) {
      csv += std::string(kind) + "," + decimal(row.parameter) + "," +
             (row.max_rel_error ? decimal(*row.max_rel_error) : std::string()) + "," +
             decimal(row.success_probability) + "," + decimal(row.leakage) + "\n";
      rows.push_back({{"kind", kind}, {"parameter", row.parameter}, {"max_rel_error", optional_json(row.max_rel_error)},
                      {"success_probability", row.success_probability}, {"leakage", row.leakage}});
    }
  };
  if (!cfg.sweep.r_values.empty()) emit("r", hhl::sweep_r(sys, cfg.solver, cfg.sweep.r_values));
  if (!cfg.sweep.t0_values.empty()) emit("t0", hhl::sweep_t0(sys, cfg.solver, cfg.sweep.t0_values));

  CommandOutput out;
  out.summary["mode"] = std::string(hhl::to_string(cfg.solver.rotation_mode));
  out.summary["rows"] = std::move(rows);
  out.artifacts.push_back({"sweep.csv", std::move(csv)});
  out.artifacts.push_back(json_artifact("sweep.json", out.summary));
  return out;
}

CommandOutput cmd_tomography(const RunConfig& cfg) {
  const auto sys = cfg.system();
  const auto rep = solve(cfg, sys);
  if (rep.final_state.n_qubits() != 4) {
    throw Error(ErrorKind::DimensionMismatch, "tomography is defined for the 4-qubit register");
  }
  auto records = tomo::simulate_readout(rep.final_state, tomo::pulse_catalog(cfg.tomography.kind));
  if (cfg.noise.readout_sigma > 0) tomo::add_readout_noise(records, cfg.noise.readout_sigma, *cfg.seed);
  if (cfg.tomography.fit) tomo::refit_peaks(records, cfg.molecule);

  const auto theory = DensityMatrix::from_pure(hhl::theoretical_final_state(sys, cfg.solver));
  Json j;
  j["kind"] = cfg.tomography.kind == tomo::CatalogKind::Full ? "full" : "partial";
  j["noise"] = cfg.noise.enabled;
  j["fit"] = cfg.tomography.fit;
  j["pulses"] = records.size();

  if (cfg.tomography.kind == tomo::CatalogKind::Full) {
    const auto recon = tomo::reconstruct_density(records);
    const Real f = fidelity(recon, theory);
    j["fidelity"] = f;
    j["fidelity_vs_simulated"] = fidelity(recon, rep.final_state);
    if (cfg.noise.enabled) {
      j["plausibility_band"] = {kBandLow, kBandHigh};
      j["in_band"] = f >= kBandLow && f < kBandHigh;
    }
    j["rho_real"] = matrix_part_json(recon.matrix(), false);
    j["rho_imag"] = matrix_part_json(recon.matrix(), true);
  } else {
    const auto part = tomo::extract_solution_partial(records);
    j["c_sq"] = part.c_sq;
    j["d_sq"] = part.d_sq;
    j["re_cd"] = part.re_cd;
    j["phase_sign"] = part.phase_sign;
    j["ratio"] = part.d_sq >= 1e-10 ? Json(part.ratio()) : Json(nullptr);
    j["solution"] = real_vector_json(part.solution());
    if (rep.x_quantum.size() == 2) {
      const Real reference = hhl::probability_ratio(rep.x_quantum);
      j["ratio_statevector"] = reference;
      if (part.d_sq >= 1e-10) j["ratio_abs_diff"] = std::abs(part.ratio() - reference);
    }
  }

  CommandOutput out;
  out.summary = std::move(j);
  out.artifacts.push_back(json_artifact("tomography.json", out.summary));
  out.artifacts.push_back({"records.json", tomo::records_to_json(records)});
  return out;
}

CommandOutput cmd_spectrum(const RunConfig& cfg) {
  const auto sys = cfg.system();
  const auto rep = solve(cfg, sys);
  if (rep.final_state.n_qubits() != 4) {
    throw Error(ErrorKind::DimensionMismatch, "the carbon spectrum is defined for the 4-qubit register");
  }
  const auto spec = nmr::synthesize_spectrum(rep.final_state, cfg.molecule);
  const auto pps = nmr::synthesize_spectrum(nmr::pps_state(1.0), cfg.molecule);
  const auto samples = sample_spectrum(spec, cfg.spectrum_points);

  Json j;
  j["temperature_k"] = cfg.molecule.temperature_k;
  j["reference_peak"] = "p0-p8";
  j["peaks"] = peaks_json(spec);
  j["pps_peaks"] = peaks_json(pps);
  if (cfg.tomography.fit) j["fit"] = fitted_peaks_json(spec, samples);

  CommandOutput out;
  out.summary = std::move(j);
  out.artifacts.push_back({"spectrum.csv", nmr::spectrum_csv(samples)});
  out.artifacts.push_back(json_artifact("spectrum.json", out.summary));
  return out;
}

Json run_manifest(const std::string& command, const RunConfig& cfg, const CommandOutput& out) {
  Json m;
  m["manifest_version"] = 1;
  m["command"] = command;
  m["config"] = config_to_json(cfg);
  m["seed"] = cfg.seed ? Json(*cfg.seed) : Json(nullptr);
  Json files = Json::array();
  for (const auto& a : out.artifacts) files.push_back(a.filename);
  m["outputs"] = std::move(files);
  m["versions"] = {{"qlsys", kVersion},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
  return m;
}

void write_outputs(const std::filesystem::path& dir, const std::string& command, const RunConfig& cfg,
                   const CommandOutput& out) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::InvalidArgument, "cannot create " + dir.string() + ": " + ec.message());
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + (dir / name).string());
    f << content;
  };
  for (const auto& a : out.artifacts) write(a.filename, a.content);
  write("manifest.json", json_text(run_manifest(command, cfg, out)));
}

}  // namespace qlsys::cli
