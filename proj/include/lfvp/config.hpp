#pragma once

#include "lfvp/fitting.hpp"
#include "lfvp/integrator.hpp"
#include "lfvp/operators.hpp"
#include "lfvp/spectral.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace lfvp {

struct SpeciesConfig
{
  Species species;
  InitialProfile profile;
};

struct OutputConfig
{
  std::string directory = ".";
  std::string prefix = "run";
  int cadence = 1;
  std::vector<int> field_modes{1};
  std::vector<double> snapshot_times;
  /// "binary" or "csv"
  std::string snapshot_format = "binary";
  /// Snapshot grid; 0 selects 4 N_F + 2 points in x and 2 N_L in v.
  int snapshot_nx = 0;
  int snapshot_nv = 0;
};

struct RunConfig
{
  std::string name = "custom";
  DomainConfig domain;
  std::vector<SpeciesConfig> species;
  /// Fixed neutralizing background. nullopt means "balance the initial kinetic charge".
  std::optional<double> background_charge = 0.0;
  SolverConfig solver;
  OutputConfig output;
  FitWindow fit_window;

  void validate() const;
};

/// landau, two_stream or ion_acoustic; throws ConfigError for other names.
RunConfig preset(const std::string& name);
std::vector<std::string> preset_names();

nlohmann::json to_json(const RunConfig& config);
/// Strict: unknown keys and type mismatches throw ConfigError naming the key path.
RunConfig from_json(const nlohmann::json& j);

/// Parses TOML (by extension .toml) or JSON text into a RunConfig.
RunConfig load_config(const std::string& path);
RunConfig parse_toml(const std::string& text, const std::string& source_name = "<string>");

/// Applies "key=value" overrides. Keys are dotted paths into the JSON form
/// (species are addressed by name, e.g. species.i.mass) or one of the aliases
/// n_legendre, n_fourier, length, v_a, v_b, dt, t_final, cadence, output_dir,
/// nu, gamma, penalty_mode (every species), epsilon (perturbed species) and
/// ion_mass (species "i"). Values are parsed as JSON when possible, else taken as strings.
void apply_overrides(RunConfig& config, const std::vector<std::string>& overrides);

/// Kinetic plasma and projected initial state for a configuration.
struct Setup
{
  Plasma plasma;
  SpectralState initial;
};

Setup build_setup(const RunConfig& config);

/// TOML manifest with every resolved parameter, followed by a [statistics] table
/// and an [outputs] table. load_config accepts it and ignores those two tables.
std::string manifest_toml(const RunConfig& config, const nlohmann::json& statistics, const nlohmann::json& outputs);

/// Generic JSON -> TOML emitter (objects become tables, arrays of objects become
/// arrays of tables, doubles use 17 significant digits).
std::string json_to_toml(const nlohmann::json& j);

} // namespace lfvp
