/**
 * Copyright 2026, The qlsys authors.
 *
 * This source code and the accompanying materials are made available under
 * the terms of the Apache License 2.0.
 */

#include <ostream>

#include "CLI11.hpp"
#include "qlsys/cli.hpp"

namespace qlsys::cli {

namespace {

std::vector<int> parse_r_range(const std::string& text) {
  // "a:b" inclusive or "a,b,c"
  std::vector<int> out;
  try {
    const auto colon = text.find(':');
    if (colon != std::string::npos) {
      const int lo = std::stoi(text.substr(0, colon));
      const int hi = std::stoi(text.substr(colon + 1));
      if (hi < lo) throw Error(ErrorKind::InvalidArgument, "empty r range " + text);
      for (int r = lo; r <= hi; ++r) out.push_back(r);
      return out;
    }
    std::size_t start = 0;
    while (start <= text.size()) {
      const auto comma = text.find(',', start);
      out.push_back(std::stoi(text.substr(start, comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::InvalidArgument, "bad r range '" + text + "'");
  }
  return out;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"HHL linear-system solver simulator", "qlsys"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  std::string mode, noise;
  std::string r_range;
  std::vector<double> t0_values;
  std::string kind;
  bool fit = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--seed", seed, "seed for stochastic paths");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--mode", mode, "eigenvalue rotation")->check(CLI::IsMember({"linear", "exact"}));
    sub->add_option("--noise", noise, "noise model")->check(CLI::IsMember({"on", "off"}));
  };
  auto* solve = app.add_subcommand("solve", "run the solver and write report.json");
  add_common(solve);
  auto* sweep = app.add_subcommand("sweep", "sweep r or t0 and write sweep.csv");
  add_common(sweep);
  sweep->add_option("--r", r_range, "r values, a:b or a,b,c");
  sweep->add_option("--t0", t0_values, "t0 values")->delimiter(',');
  auto* tomography = app.add_subcommand("tomography", "simulate readout and reconstruct");
  add_common(tomography);
  tomography->add_option("--kind", kind, "pulse catalog")->check(CLI::IsMember({"full", "partial"}));
  tomography->add_flag("--fit", fit, "route peak amplitudes through the Lorentzian fit");
  auto* spectrum = app.add_subcommand("spectrum", "write the carbon spectrum of the final state");
  add_common(spectrum);
  spectrum->add_flag("--fit", fit, "fit the sampled spectrum");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << error_json("UsageError", e.what()).dump() << "\n";
    return 2;
  }

  try {
    RunConfig cfg = load_config(config_path);
    if (seed) cfg.seed = seed;
    if (mode == "linear") cfg.solver.rotation_mode = hhl::RotationMode::LinearApprox;
    if (mode == "exact") cfg.solver.rotation_mode = hhl::RotationMode::ExactArcsin;
    if (noise == "on") cfg.noise.enabled = true;
    if (noise == "off") cfg.noise.enabled = false;
    if (!r_range.empty()) cfg.sweep.r_values = parse_r_range(r_range);
    if (!t0_values.empty()) cfg.sweep.t0_values = t0_values;
    if (kind == "full") cfg.tomography.kind = tomo::CatalogKind::Full;
    if (kind == "partial") cfg.tomography.kind = tomo::CatalogKind::Partial;
    if (fit) cfg.tomography.fit = true;
    cfg.validate();

    std::string command;
    CommandOutput result;
    if (solve->parsed()) {
      command = "solve";
      result = cmd_solve(cfg);
    } else if (sweep->parsed()) {
      command = "sweep";
      result = cmd_sweep(cfg);
    } else if (tomography->parsed()) {
      command = "tomography";
      result = cmd_tomography(cfg);
    } else {
      command = "spectrum";
      result = cmd_spectrum(cfg);
    }
    write_outputs(out_dir, command, cfg, result);
    out << json_text(result.summary);
    return 0;
  } catch (const Error& e) {
    err << error_json(to_string(e.kind()), e.detail()).dump() << "\n";
  } catch (const std::exception& e) {
    err << error_json("Internal", e.what()).dump() << "\n";
  }
  return 1;
}

}  // namespace qlsys::cli
