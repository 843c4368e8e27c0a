#pragma once

#include <string>
#include <vector>

#include "conetrap/singularity.hpp"

namespace conetrap {

// A fully resolved run description: CLI command, model sections, numerics,
// sweep lists, and output routing, with library defaults filled in.
struct RunConfig {
  std::string command;  // exponents | sweep-delta | scan-contrast | flux-check | validate

  bool has_geometry = false;
  double alpha_degrees = 0.0;
  std::string mesh_file;  // alternative to alpha_degrees

  bool has_material = false;
  double eps_plus = 1.0;
  double eps_minus = -1.0;
  double delta = 0.0;
  DissipationScope scope = DissipationScope::MinusOnly;
  bool validation_override = false;  // permits eps_minus >= 0 (harmonic checks)

  CutoffProfile cutoff;
  Numerics numerics;
  bool sphere_route = false;

  std::vector<double> deltas;  // sweep-delta
  std::vector<double> kappas;  // scan-contrast (explicit or generated grid)
  std::vector<double> taus;    // flux-check
  std::vector<int> modes;      // scan-contrast modes; empty = 0..m_max

  std::string out_path;        // empty = stdout
  std::string format = "csv";  // csv | json
  int jobs = 1;

  TipGeometry geometry() const;
  Material material() const;
};

// Parse the TOML-like config document. Syntax or unknown-field problems
// raise ConfigParseError with a line diagnostic; contract violations
// (missing [material], unsorted deltas, nonnegative kappa grid, bad enum
// values) raise ConfigValidationError.
RunConfig parse_config(const std::string& text);

// Read and parse a config file; IoError if unreadable.
RunConfig load_config(const std::string& path);

// Ensure the sections referenced by config.command are complete.
void validate_for_command(const RunConfig& config);

// Deterministic one-line-per-section echo of the effective configuration,
// suitable for '#' output headers (12-significant-digit floats).
std::vector<std::string> config_echo(const RunConfig& config);

// Shortest round-trippable decimal rendering used everywhere a float is
// serialized (12 significant digits).
std::string format_double(double value);

}  // namespace conetrap
