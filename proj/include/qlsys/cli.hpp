/**
 * Copyright 2026, The qlsys authors.
 *
 * This source code and the accompanying materials are made available under
 * the terms of the Apache License 2.0.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qlsys/hhl.hpp"
#include "qlsys/nmr.hpp"
#include "qlsys/tomography.hpp"

namespace qlsys::cli {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

struct NoiseSettings {
  bool enabled = false;
  Real duration_ms = 50.0;  // total circuit time
  Real depolarizing = 0.01;
  Real readout_sigma = 0.0;  // additive peak noise, needs a seed
};

struct SweepSettings {
  std::vector<int> r_values;
  std::vector<Real> t0_values;
};

struct TomographySettings {
  tomo::CatalogKind kind = tomo::CatalogKind::Full;
  bool fit = false;
};

struct RunConfig {
  ComplexMatrix matrix;
  ComplexVector rhs;
  std::optional<Real> theta;  // set when b came from prepare_b
  hhl::SolverConfig solver;
  NoiseSettings noise;
  nmr::MoleculeParams molecule = nmr::MoleculeParams::defaults();
  SweepSettings sweep;
  TomographySettings tomography;
  int spectrum_points = 4001;
  std::optional<std::uint64_t> seed;

  hhl::LinearSystem system() const { return {matrix, rhs}; }
  NoiseSchedule noise_schedule() const;
  /// Throws ConfigParseError (e.g. readout noise without a seed).
  void validate() const;
};

/// Parses the JSON config. Numbers may be decimal strings or JSON numbers;
/// complex entries are a scalar or [re, im]. A manifest written by a previous
/// run is accepted and replays its config snapshot. Throws ConfigParseError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Snapshot with every number as a round-trip decimal string.
Json config_to_json(const RunConfig& cfg);

struct Artifact {
  std::string filename;
  std::string content;
};

struct CommandOutput {
  Json summary;  // also the main report file
  std::vector<Artifact> artifacts;
};

CommandOutput cmd_solve(const RunConfig& cfg);
CommandOutput cmd_sweep(const RunConfig& cfg);
CommandOutput cmd_tomography(const RunConfig& cfg);
CommandOutput cmd_spectrum(const RunConfig& cfg);

/// manifest.json content for a finished command.
Json run_manifest(const std::string& command, const RunConfig& cfg, const CommandOutput& out);

/// Writes the artifacts and manifest.json into `dir` (created if needed).
void write_outputs(const std::filesystem::path& dir, const std::string& command, const RunConfig& cfg,
                   const CommandOutput& out);

/// {"error": {"kind": ..., "message": ...}}
Json error_json(std::string_view kind, std::string_view message);

/// Full command-line entry point; returns the process exit code. Errors are
/// printed to `err` as error_json.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

std::string json_text(const Json& j);

}  // namespace qlsys::cli
