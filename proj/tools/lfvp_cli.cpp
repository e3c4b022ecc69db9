// Command-line driver for the Legendre-Fourier Vlasov-Poisson solver.
//
//   lfvp_cli run <config.toml|config.json> [--output-dir DIR]
//   lfvp_cli preset <landau|two_stream|ion_acoustic> [--override key=value ...] [--output-dir DIR]
//   lfvp_cli fit <rate|period> <diagnostics.csv> [--from T0] [--to T1] [--column NAME] [--rectified]
//   lfvp_cli snapshot <csv|binary> --at T (--config FILE | --preset NAME) [--override key=value ...]
//
// LFVP_OUTPUT_DIR, when set, replaces the output directory of every run.
// Exit status: 0 success, 1 usage, 2 configuration, 3 solver, 4 output, 5 fit.

#include "lfvp/config.hpp"
#include "lfvp/errors.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit
{
  ok = 0,
  usage_failure = 1,
  config_failure = 2,
  solver_failure = 3,
  io_failure = 4,
  fit_failure = 5,
};

std::string snapshot_name(const lfvp::RunConfig& config, const std::string& species, double t)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "_%s_t%.6g", species.c_str(), t);
  return config.output.prefix + buf + (config.output.snapshot_format == "csv" ? ".csv" : ".bin");
}

int execute(lfvp::RunConfig config, const std::string& output_dir_flag)
{
  if (const char* env = std::getenv("LFVP_OUTPUT_DIR"); env && *env)
    config.output.directory = env;
  else if (!output_dir_flag.empty())
    config.output.directory = output_dir_flag;

  // Everything that can be rejected up front is checked before any file exists.
  const auto setup = lfvp::build_setup(config);
  config.background_charge = setup.plasma.background_charge;

  const fs::path dir(config.output.directory);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw lfvp::IoError("cannot create output directory '" + dir.string() + "': " + ec.message());

  const fs::path csv_path = dir / (config.output.prefix + ".csv");
  const fs::path manifest_path = dir / (config.output.prefix + ".manifest.toml");
  std::ofstream csv(csv_path);
  if (!csv)
    throw lfvp::IoError("cannot open '" + csv_path.string() + "' for writing");
  lfvp::write_csv_header(csv, setup.plasma, config.output.field_modes);

  json snapshots = json::array();
  lfvp::RunOptions options;
  options.cadence = config.output.cadence;
  options.field_modes = config.output.field_modes;
  options.snapshot_times = config.output.snapshot_times;
  options.on_record = [&](const lfvp::DiagnosticsRecord& rec) {
    lfvp::write_csv_row(csv, rec);
    csv.flush();
  };
  options.on_snapshot = [&](double t, const lfvp::SpectralState& states) {
    const auto& domain = setup.plasma.domain;
    const int nx = config.output.snapshot_nx > 0 ? config.output.snapshot_nx : lfvp::default_grid_points(domain);
    const int nv = config.output.snapshot_nv > 0 ? config.output.snapshot_nv : 2 * domain.n_legendre;
    for (int s = 0; s < setup.plasma.n_species(); ++s) {
      const auto& basis = setup.plasma.bases[s];
      const auto grid = lfvp::reconstruct_f(domain, basis, states[s], nx, nv);
      const fs::path path = dir / snapshot_name(config, setup.plasma.species[s].name, t);
      if (config.output.snapshot_format == "csv")
        lfvp::write_snapshot_csv(path.string(), grid);
      else
        lfvp::write_snapshot_binary(path.string(), grid, domain.length, basis.v_a, basis.v_b);
      snapshots.push_back(path.filename().string());
    }
  };

  const auto result = lfvp::run(setup.plasma, config.solver, setup.initial, options);
  csv.close();

  const auto& st = result.statistics;
  json stats = {
      {"steps_planned", result.steps_planned},
      {"steps_taken", st.steps_taken},
      {"t_reached", result.t_reached},
      {"completed", result.completed},
      {"newton_iters", st.newton_iters},
      {"gmres_iters", st.gmres_iters},
      {"max_newton_iters", st.max_newton_iters},
      {"max_final_residual", st.max_final_residual},
      {"wall_seconds", st.wall_seconds},
      {"warnings", result.warnings},
  };
  if (result.failed_step) {
    stats["failed_step"] = *result.failed_step;
    stats["failure"] = result.failure;
  }
  const json outputs = {{"diagnostics", csv_path.filename().string()}, {"snapshots", snapshots}};

  std::ofstream manifest(manifest_path);
  if (!manifest)
    throw lfvp::IoError("cannot open '" + manifest_path.string() + "' for writing");
  manifest << lfvp::manifest_toml(config, stats, outputs);
  if (!manifest)
    throw lfvp::IoError("failed writing '" + manifest_path.string() + "'");

  if (!result.completed) {
    std::cerr << "[solver] step " << *result.failed_step << " (t = " << (*result.failed_step) * config.solver.dt
              << "): " << result.failure << "\n";
    std::cerr << "partial diagnostics up to t = " << result.t_reached << " in " << csv_path.string() << "\n";
    return solver_failure;
  }
  std::cout << "wrote " << csv_path.string() << " (" << result.records.size() << " records, "
            << st.steps_taken << " steps, " << st.newton_iters << " Newton / " << st.gmres_iters
            << " GMRES iterations)\n";
  std::cout << "manifest " << manifest_path.string() << "\n";
  return ok;
}

int fit(const std::string& kind, const std::string& csv, double from, double to, const std::string& column,
        bool rectified)
{
  const auto series = lfvp::read_series(csv, column);
  const lfvp::FitWindow window{from, to};
  char buf[64];
  if (kind == "rate") {
    std::snprintf(buf, sizeof buf, "%.10g", lfvp::fit_damping_rate(series, window));
    std::cout << "rate " << buf << "\n";
  } else {
    std::snprintf(buf, sizeof buf, "%.10g", lfvp::fit_period(series, window, rectified));
    std::cout << "period " << buf << "\n";
  }
  return ok;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Legendre-Fourier spectral Vlasov-Poisson solver"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  auto* run_cmd = app.add_subcommand("run", "run a configuration file (TOML or JSON)");
  run_cmd->add_option("config", config_path, "configuration file")->required();
  run_cmd->add_option("--output-dir", output_dir, "output directory (LFVP_OUTPUT_DIR takes precedence)");

  std::string preset_name;
  std::vector<std::string> overrides;
  auto* preset_cmd = app.add_subcommand("preset", "run a benchmark preset");
  preset_cmd->add_option("name", preset_name, "landau, two_stream or ion_acoustic")->required();
  preset_cmd->add_option("--override,-o", overrides, "key=value parameter override")->take_all();
  preset_cmd->add_option("--output-dir", output_dir, "output directory (LFVP_OUTPUT_DIR takes precedence)");

  std::string fit_kind;
  std::string fit_csv;
  std::string fit_column = "E1_abs";
  double fit_from = -std::numeric_limits<double>::infinity();
  double fit_to = std::numeric_limits<double>::infinity();
  bool rectified = false;
  auto* fit_cmd = app.add_subcommand("fit", "fit a damping rate or period to a diagnostics CSV");
  fit_cmd->add_option("kind", fit_kind, "rate or period")->required()->check(CLI::IsMember({"rate", "period"}));
  fit_cmd->add_option("csv", fit_csv, "diagnostics CSV")->required();
  fit_cmd->add_option("--from", fit_from, "window start");
  fit_cmd->add_option("--to", fit_to, "window end");
  fit_cmd->add_option("--column", fit_column, "series column");
  fit_cmd->add_flag("--rectified", rectified, "input is |sin|-like; report twice the peak spacing");

  std::string snap_format;
  double snap_at = 0.0;
  std::string snap_config;
  std::string snap_preset;
  auto* snap_cmd = app.add_subcommand("snapshot", "run to time t and write phase-space snapshots");
  snap_cmd->add_option("format", snap_format, "csv or binary")->required()->check(CLI::IsMember({"csv", "binary"}));
  snap_cmd->add_option("--at", snap_at, "snapshot time")->required();
  auto* snap_cfg_opt = snap_cmd->add_option("--config", snap_config, "configuration file");
  auto* snap_preset_opt = snap_cmd->add_option("--preset", snap_preset, "preset name");
  snap_cfg_opt->excludes(snap_preset_opt);
  snap_cmd->add_option("--override,-o", overrides, "key=value parameter override")->take_all();
  snap_cmd->add_option("--output-dir", output_dir, "output directory (LFVP_OUTPUT_DIR takes precedence)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage_failure;
  }

  const char* stage = "config";
  try {
    if (*run_cmd) {
      auto config = lfvp::load_config(config_path);
      return execute(std::move(config), output_dir);
    }
    if (*preset_cmd) {
      auto config = lfvp::preset(preset_name);
      lfvp::apply_overrides(config, overrides);
      return execute(std::move(config), output_dir);
    }
    if (*fit_cmd) {
      stage = "fit";
      return fit(fit_kind, fit_csv, fit_from, fit_to, fit_column, rectified);
    }
    if (*snap_cmd) {
      if (snap_config.empty() == snap_preset.empty())
        throw lfvp::ConfigError("snapshot: give exactly one of --config or --preset");
      auto config = snap_config.empty() ? lfvp::preset(snap_preset) : lfvp::load_config(snap_config);
      lfvp::apply_overrides(config, overrides);
      config.solver.t_final = snap_at;
      config.output.snapshot_times = {snap_at};
      config.output.snapshot_format = snap_format;
      return execute(std::move(config), output_dir);
    }
  } catch (const lfvp::ConfigError& e) {
    std::cerr << "[config] " << e.what() << "\n";
    return config_failure;
  } catch (const lfvp::SolverError& e) {
    std::cerr << "[solver] " << e.what() << "\n";
    return solver_failure;
  } catch (const lfvp::IoError& e) {
    std::cerr << "[io] " << e.what() << "\n";
    return io_failure;
  } catch (const lfvp::FitError& e) {
    std::cerr << "[fit] " << e.what() << "\n";
    return fit_failure;
  } catch (const std::exception& e) {
    std::cerr << "[" << stage << "] " << e.what() << "\n";
    return config_failure;
  }
  return ok;
}
