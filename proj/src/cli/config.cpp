/**
 * Copyright 2026, The qlsys authors.
 *
 * This source code and the accompanying materials are made available under
 * the terms of the Apache License 2.0.
 */

#include <charconv>
#include <fstream>
#include <sstream>

#include "qlsys/cli.hpp"

namespace qlsys::cli {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::ConfigParseError, where + ": " + what);
}

Real to_real(const Json& j, const std::string& where) {
  if (j.is_number()) return j.get<Real>();
  if (!j.is_string()) fail(where, "expected a decimal number");
  const auto& s = j.get_ref<const std::string&>();
  Real v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size() || s.empty()) fail(where, "bad decimal '" + s + "'");
  return v;
}

Complex to_complex(const Json& j, const std::string& where) {
  if (j.is_array()) {
    if (j.size() != 2) fail(where, "complex entries are [re, im]");
    return {to_real(j[0], where + "[0]"), to_real(j[1], where + "[1]")};
  }
  return {to_real(j, where), 0.0};
}

long to_integer(const Json& j, const std::string& where) {
  const Real v = to_real(j, where);
  if (v != std::floor(v) || std::abs(v) > 1e15) fail(where, "expected an integer");
  return static_cast<long>(v);
}

bool to_bool(const Json& j, const std::string& where) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "true" || s == "on") return true;
    if (s == "false" || s == "off") return false;
  }
  fail(where, "expected a boolean");
}

std::string decimal(Real v) {
  char buf[32];
  const auto end = std::to_chars(buf, buf + sizeof(buf), v).ptr;
  return std::string(buf, end);
}

Json complex_json(Complex z) {
  if (z.imag() == 0) return decimal(z.real());
  return Json::array({decimal(z.real()), decimal(z.imag())});
}

template <std::size_t N>
void read_array(const Json& j, std::array<Real, N>& out, const std::string& where) {
  if (!j.is_array() || j.size() != N) fail(where, "expected " + std::to_string(N) + " entries");
  for (std::size_t i = 0; i < N; ++i) out[i] = to_real(j[i], where + "[" + std::to_string(i) + "]");
}

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) fail(where, "unknown key '" + key + "'");
  }
}

void parse_system(const Json& j, RunConfig& cfg) {
  check_keys(j, {"matrix", "b", "theta"}, "system");
  if (j.contains("matrix")) {
    const auto& m = j["matrix"];
    if (!m.is_array() || m.empty()) fail("system.matrix", "expected a non-empty array of rows");
    const auto n = static_cast<Eigen::Index>(m.size());
    cfg.matrix.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& row = m[static_cast<std::size_t>(i)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) fail("system.matrix", "matrix must be square");
      for (Eigen::Index k = 0; k < n; ++k) {
        cfg.matrix(i, k) = to_complex(row[static_cast<std::size_t>(k)],
                                      "system.matrix[" + std::to_string(i) + "][" + std::to_string(k) + "]");
      }
    }
  } else {
    cfg.matrix = hhl::demo_matrix();
  }
  if (j.contains("b") && j.contains("theta")) fail("system", "give either b or theta");
  if (j.contains("theta")) {
    cfg.theta = to_real(j["theta"], "system.theta");
    cfg.rhs = hhl::prepare_b(*cfg.theta).amplitudes();
  } else if (j.contains("b")) {
    const auto& b = j["b"];
    if (!b.is_array() || static_cast<Eigen::Index>(b.size()) != cfg.matrix.rows()) {
      fail("system.b", "length must match the matrix");
    }
    cfg.rhs.resize(cfg.matrix.rows());
    for (std::size_t i = 0; i < b.size(); ++i) {
      cfg.rhs(static_cast<Eigen::Index>(i)) = to_complex(b[i], "system.b[" + std::to_string(i) + "]");
    }
    const Real norm = cfg.rhs.norm();
    if (!(norm > 0)) fail("system.b", "b must be non-zero");
    cfg.rhs /= norm;
  } else {
    fail("system", "missing b or theta");
  }
}

void parse_solver(const Json& j, hhl::SolverConfig& s) {
  check_keys(j, {"clock_qubits", "t0", "r", "mode", "c_tilde", "inversion", "exact_encoding"}, "solver");
  if (j.contains("clock_qubits")) s.clock_qubits = static_cast<int>(to_integer(j["clock_qubits"], "solver.clock_qubits"));
  if (j.contains("t0")) s.t0 = to_real(j["t0"], "solver.t0");
  if (j.contains("r")) s.r = static_cast<int>(to_integer(j["r"], "solver.r"));
  if (j.contains("mode")) {
    const auto mode = j["mode"].is_string() ? j["mode"].get<std::string>() : "";
    if (mode == "linear") s.rotation_mode = hhl::RotationMode::LinearApprox;
    else if (mode == "exact") s.rotation_mode = hhl::RotationMode::ExactArcsin;
    else fail("solver.mode", "expected linear or exact");
  }
  if (j.contains("c_tilde")) s.c_tilde = to_real(j["c_tilde"], "solver.c_tilde");
  if (j.contains("inversion")) {
    const auto inv = j["inversion"].is_string() ? j["inversion"].get<std::string>() : "";
    if (inv == "auto") s.inversion = hhl::InversionPath::Auto;
    else if (inv == "swap") s.inversion = hhl::InversionPath::Swap;
    else if (inv == "direct") s.inversion = hhl::InversionPath::Direct;
    else fail("solver.inversion", "expected auto, swap or direct");
  }
  if (j.contains("exact_encoding")) s.exact_encoding = to_bool(j["exact_encoding"], "solver.exact_encoding");
}

void parse_noise(const Json& j, NoiseSettings& n) {
  check_keys(j, {"enabled", "duration_ms", "depolarizing", "readout_sigma"}, "noise");
  if (j.contains("enabled")) n.enabled = to_bool(j["enabled"], "noise.enabled");
  if (j.contains("duration_ms")) n.duration_ms = to_real(j["duration_ms"], "noise.duration_ms");
  if (j.contains("depolarizing")) n.depolarizing = to_real(j["depolarizing"], "noise.depolarizing");
  if (j.contains("readout_sigma")) n.readout_sigma = to_real(j["readout_sigma"], "noise.readout_sigma");
}

void parse_molecule(const Json& j, nmr::MoleculeParams& m) {
  check_keys(j, {"shift_hz", "drift_hz_per_k", "t2_star_ms", "j_hz", "temperature_k", "linewidth_hz"}, "molecule");
  if (j.contains("shift_hz")) read_array(j["shift_hz"], m.shift_hz, "molecule.shift_hz");
  if (j.contains("drift_hz_per_k")) read_array(j["drift_hz_per_k"], m.drift_hz_per_k, "molecule.drift_hz_per_k");
  if (j.contains("t2_star_ms")) read_array(j["t2_star_ms"], m.t2_star_ms, "molecule.t2_star_ms");
  if (j.contains("j_hz")) {
    const auto& t = j["j_hz"];
    if (!t.is_array() || t.size() != 4) fail("molecule.j_hz", "expected a 4 x 4 table");
    for (std::size_t i = 0; i < 4; ++i) read_array(t[i], m.j_hz[i], "molecule.j_hz[" + std::to_string(i) + "]");
  }
  if (j.contains("temperature_k")) m.temperature_k = to_real(j["temperature_k"], "molecule.temperature_k");
  if (j.contains("linewidth_hz")) m.linewidth_hz = to_real(j["linewidth_hz"], "molecule.linewidth_hz");
  try {
    m.validate();
  } catch (const Error& e) {
    fail("molecule", e.detail());
  }
}

void parse_sweep(const Json& j, SweepSettings& s) {
  check_keys(j, {"r", "t0"}, "sweep");
  if (j.contains("r")) {
    if (!j["r"].is_array()) fail("sweep.r", "expected an array");
    for (const auto& v : j["r"]) s.r_values.push_back(static_cast<int>(to_integer(v, "sweep.r")));
  }
  if (j.contains("t0")) {
    if (!j["t0"].is_array()) fail("sweep.t0", "expected an array");
    for (const auto& v : j["t0"]) s.t0_values.push_back(to_real(v, "sweep.t0"));
  }
}

void parse_tomography(const Json& j, TomographySettings& t) {
  check_keys(j, {"kind", "fit"}, "tomography");
  if (j.contains("kind")) {
    const auto kind = j["kind"].is_string() ? j["kind"].get<std::string>() : "";
    if (kind == "full") t.kind = tomo::CatalogKind::Full;
    else if (kind == "partial") t.kind = tomo::CatalogKind::Partial;
    else fail("tomography.kind", "expected full or partial");
  }
  if (j.contains("fit")) t.fit = to_bool(j["fit"], "tomography.fit");
}

}  // namespace

NoiseSchedule RunConfig::noise_schedule() const {
  NoiseSchedule s;
  if (!noise.enabled) return s;
  const int n = static_cast<int>(solver.clock_qubits) + qubit_count_for_dimension(matrix.rows()) + 1;
  for (int q = 0; q < n; ++q) s.t2_star.push_back(molecule.t2_star_ms[static_cast<std::size_t>(std::min(q, 3))]);
  s.total_duration = noise.duration_ms;
  s.depolarizing_probability = noise.depolarizing;
  return s;
}

void RunConfig::validate() const {
  if (noise.readout_sigma < 0) fail("noise.readout_sigma", "must be >= 0");
  if (noise.duration_ms < 0) fail("noise.duration_ms", "must be >= 0");
  if (noise.depolarizing < 0 || noise.depolarizing > 1) fail("noise.depolarizing", "must lie in [0, 1]");
  if (noise.readout_sigma > 0 && !seed) fail("seed", "readout noise is stochastic and needs a seed");
  if (spectrum_points < 2) fail("spectrum.points", "need at least 2 points");
}

RunConfig parse_config(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail("config", e.what());
  }
  if (doc.is_object() && doc.contains("manifest_version")) {
    if (!doc.contains("config")) fail("manifest", "missing config snapshot");
    Json cfg = doc["config"];
    if (doc.contains("seed") && !doc["seed"].is_null()) cfg["seed"] = doc["seed"];
    doc = std::move(cfg);
  }
  check_keys(doc, {"system", "solver", "noise", "molecule", "sweep", "tomography", "spectrum", "seed"}, "config");

  RunConfig cfg;
  try {
    if (!doc.contains("system")) fail("config", "missing system section");
    parse_system(doc["system"], cfg);
    if (doc.contains("solver")) parse_solver(doc["solver"], cfg.solver);
    if (doc.contains("noise")) parse_noise(doc["noise"], cfg.noise);
    if (doc.contains("molecule")) parse_molecule(doc["molecule"], cfg.molecule);
    if (doc.contains("sweep")) parse_sweep(doc["sweep"], cfg.sweep);
    if (doc.contains("tomography")) parse_tomography(doc["tomography"], cfg.tomography);
    if (doc.contains("spectrum")) {
      check_keys(doc["spectrum"], {"points"}, "spectrum");
      if (doc["spectrum"].contains("points")) {
        cfg.spectrum_points = static_cast<int>(to_integer(doc["spectrum"]["points"], "spectrum.points"));
      }
    }
    if (doc.contains("seed") && !doc["seed"].is_null()) {
      const long seed = to_integer(doc["seed"], "seed");
      if (seed < 0) fail("seed", "must be non-negative");
      cfg.seed = static_cast<std::uint64_t>(seed);
    }
  } catch (const nlohmann::json::exception& e) {
    fail("config", e.what());
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path.string(), "cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

Json config_to_json(const RunConfig& cfg) {
  Json sys;
  Json m = Json::array();
  for (Eigen::Index i = 0; i < cfg.matrix.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < cfg.matrix.cols(); ++k) row.push_back(complex_json(cfg.matrix(i, k)));
    m.push_back(std::move(row));
  }
  sys["matrix"] = std::move(m);
  if (cfg.theta) {
    sys["theta"] = decimal(*cfg.theta);
  } else {
    Json b = Json::array();
    for (Eigen::Index i = 0; i < cfg.rhs.size(); ++i) b.push_back(complex_json(cfg.rhs(i)));
    sys["b"] = std::move(b);
  }

  const auto& s = cfg.solver;
  Json solver;
  solver["clock_qubits"] = s.clock_qubits;
  solver["t0"] = decimal(s.t0);
  solver["r"] = s.r;
  solver["mode"] = std::string(hhl::to_string(s.rotation_mode));
  if (s.c_tilde) solver["c_tilde"] = decimal(*s.c_tilde);
  solver["inversion"] = std::string(hhl::to_string(s.inversion));
  solver["exact_encoding"] = s.exact_encoding;

  Json noise;
  noise["enabled"] = cfg.noise.enabled;
  noise["duration_ms"] = decimal(cfg.noise.duration_ms);
  noise["depolarizing"] = decimal(cfg.noise.depolarizing);
  noise["readout_sigma"] = decimal(cfg.noise.readout_sigma);

  const auto& mp = cfg.molecule;
  auto arr = [](const std::array<Real, 4>& a) {
    Json out = Json::array();
    for (Real v : a) out.push_back(decimal(v));
    return out;
  };
  Json mol;
  mol["shift_hz"] = arr(mp.shift_hz);
  mol["drift_hz_per_k"] = arr(mp.drift_hz_per_k);
  mol["t2_star_ms"] = arr(mp.t2_star_ms);
  Json jt = Json::array();
  for (const auto& row : mp.j_hz) jt.push_back(arr(row));
  mol["j_hz"] = std::move(jt);
  mol["temperature_k"] = decimal(mp.temperature_k);
  mol["linewidth_hz"] = decimal(mp.linewidth_hz);

  Json sweep;
  sweep["r"] = cfg.sweep.r_values;
  Json t0 = Json::array();
  for (Real v : cfg.sweep.t0_values) t0.push_back(decimal(v));
  sweep["t0"] = std::move(t0);

  Json out;
  out["system"] = std::move(sys);
  out["solver"] = std::move(solver);
  out["noise"] = std::move(noise);
  out["molecule"] = std::move(mol);
  out["sweep"] = std::move(sweep);
  out["tomography"] = {{"kind", cfg.tomography.kind == tomo::CatalogKind::Full ? "full" : "partial"},
                       {"fit", cfg.tomography.fit}};
  out["spectrum"] = {{"points", cfg.spectrum_points}};
  if (cfg.seed) out["seed"] = *cfg.seed;
  return out;
}

}  // namespace qlsys::cli
