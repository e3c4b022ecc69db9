#include "lfvp/config.hpp"
#include "lfvp/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace lfvp;

namespace {

const char* minimal_toml = R"(
name = "demo"

[domain]
length = 6.283185307179586
n_legendre = 32
n_fourier = 4
background_charge = "auto"

[[species]]
name = "e"
charge = -1.0
mass = 1.0
nu = 0.5

[species.profile]
kind = "maxwellian"
alpha = 1.0
epsilon = 0.01

[solver]
dt = 0.1
t_final = 1.0
)";

std::string error_of(const std::function<void()>& f)
{
  try {
    f();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

} // namespace

TEST_CASE("preset parameter tables")
{
  const auto l = preset("landau");
  CHECK(l.domain.length == 2.0 * std::numbers::pi);
  CHECK(l.domain.n_legendre == 201);
  CHECK(l.domain.n_fourier == 25);
  CHECK(l.solver.dt == 0.05);
  CHECK(l.solver.t_final == 100.0);
  CHECK(l.species.size() == 1);
  CHECK(l.species[0].species.nu == 1.0);
  CHECK(l.species[0].species.gamma == 0.5);
  CHECK(l.species[0].species.penalty_mode == PenaltyMode::skip_first_three);
  CHECK(l.species[0].profile.epsilon == 1e-3);
  CHECK_FALSE(l.background_charge.has_value());
  CHECK(l.fit_window.from == 2.0);
  CHECK(l.fit_window.to == 20.0);

  const auto t = preset("two_stream");
  CHECK(t.domain.length == 4.0 * std::numbers::pi);
  CHECK(t.solver.dt == 0.01);
  CHECK(t.solver.t_final == 200.0);
  CHECK(t.species[0].profile.alpha == doctest::Approx(1.0 / std::sqrt(8.0)));
  CHECK(t.species[0].profile.drift == 1.0);
  CHECK(t.species[0].profile.kind == InitialProfile::Kind::two_stream);

  const auto ia = preset("ion_acoustic");
  CHECK(ia.domain.length == 10.0);
  CHECK(ia.domain.n_legendre == 101);
  CHECK(ia.solver.dt == 1.0);
  CHECK(ia.solver.t_final == 450.0);
  REQUIRE(ia.species.size() == 2);
  CHECK(ia.species[0].species.nu == 0.5);
  CHECK(ia.species[0].profile.epsilon == 0.0);
  CHECK(ia.species[1].species.mass == 1836.0);
  CHECK(ia.species[1].species.charge == 1.0);
  CHECK(*ia.species[1].species.v_b == doctest::Approx(5.0 / 135.0));
  CHECK(ia.species[1].profile.epsilon == 0.01);
  CHECK(*ia.background_charge == 0.0);

  CHECK(preset_names().size() == 3);
  CHECK_THROWS_AS(preset("bump_on_tail"), ConfigError);
}

TEST_CASE("auto background neutralizes the electrons")
{
  auto cfg = preset("landau");
  cfg.domain.n_legendre = 32;
  cfg.domain.n_fourier = 2;
  const auto setup = build_setup(cfg);
  CHECK(setup.plasma.background_charge == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(net_charge(setup.plasma, setup.initial)) < 1e-15);

  cfg.background_charge = 0.0;
  CHECK_THROWS_AS(build_setup(cfg), ConfigError);
}

TEST_CASE("overrides")
{
  auto cfg = preset("ion_acoustic");
  apply_overrides(cfg, {"n_legendre=64", "t_final=20", "nu=0.25", "ion_mass=100", "epsilon=0.02",
                        "species.e.gamma=0.3", "output_dir=/tmp/x", "fit_from=5", "penalty_mode=all_modes"});
  CHECK(cfg.domain.n_legendre == 64);
  CHECK(cfg.solver.t_final == 20.0);
  CHECK(cfg.species[0].species.nu == 0.25);
  CHECK(cfg.species[1].species.nu == 0.25);
  CHECK(cfg.species[1].species.mass == 100.0);
  CHECK(cfg.species[1].profile.epsilon == 0.02);
  CHECK(cfg.species[0].profile.epsilon == 0.0);
  CHECK(cfg.species[0].species.gamma == 0.3);
  CHECK(cfg.species[1].species.gamma == 0.5);
  CHECK(cfg.output.directory == "/tmp/x");
  CHECK(cfg.fit_window.from == 5.0);
  CHECK(cfg.species[1].species.penalty_mode == PenaltyMode::all_modes);

  CHECK_THROWS_AS(apply_overrides(cfg, {"warp_factor=9"}), ConfigError);
  CHECK_THROWS_AS(apply_overrides(cfg, {"n_legendre"}), ConfigError);
  CHECK_THROWS_AS(apply_overrides(cfg, {"species.p.mass=1"}), ConfigError);
  CHECK_THROWS_AS(apply_overrides(cfg, {"n_legendre=\"many\""}), ConfigError);
  CHECK_THROWS_AS(apply_overrides(cfg, {"gamma=2"}), ConfigError);
}

TEST_CASE("TOML and JSON input")
{
  const auto cfg = parse_toml(minimal_toml);
  CHECK(cfg.name == "demo");
  CHECK(cfg.domain.n_legendre == 32);
  CHECK(cfg.domain.v_a == -5.0);
  CHECK_FALSE(cfg.background_charge.has_value());
  CHECK(cfg.species[0].species.nu == 0.5);
  CHECK(cfg.species[0].profile.epsilon == 0.01);
  CHECK(cfg.solver.dt == 0.1);
  CHECK(cfg.solver.newton_max_iters == 25);

  const auto dir = std::filesystem::temp_directory_path() / "lfvp_config_test";
  std::filesystem::create_directories(dir);
  const auto json_path = (dir / "c.json").string();
  {
    std::ofstream out(json_path);
    out << to_json(cfg).dump(2);
  }
  const auto back = load_config(json_path);
  CHECK(to_json(back) == to_json(cfg));

  const auto toml_path = (dir / "c.toml").string();
  {
    std::ofstream out(toml_path);
    out << minimal_toml;
  }
  CHECK(to_json(load_config(toml_path)) == to_json(cfg));
  CHECK_THROWS_AS(load_config((dir / "absent.toml").string()), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("configuration errors name the offending key")
{
  std::string text = minimal_toml;
  text.replace(text.find("nu = 0.5"), 8, "nu = 0.5\nviscosity = 2");
  CHECK(error_of([&] { parse_toml(text, "in.toml"); }).find("viscosity") != std::string::npos);

  text = minimal_toml;
  text.replace(text.find("n_fourier = 4"), 13, "n_fourier = \"four\"");
  CHECK(error_of([&] { parse_toml(text); }).find("domain.n_fourier") != std::string::npos);

  const auto syntax = error_of([] { parse_toml("[domain\nlength = 1", "bad.toml"); });
  CHECK(syntax.rfind("bad.toml:1:", 0) == 0);

  text = minimal_toml;
  text.replace(text.find("kind = \"maxwellian\""), 19, "kind = \"kappa\"");
  CHECK(error_of([&] { parse_toml(text); }).find("kappa") != std::string::npos);

  CHECK(error_of([] { parse_toml("name = \"x\"\n"); }).find("species") != std::string::npos);
}

TEST_CASE("manifest round trip")
{
  for (const auto& name : preset_names()) {
    auto cfg = preset(name);
    cfg.output.snapshot_times = {1.0, 2.5};
    const nlohmann::json stats = {{"steps_taken", 10}, {"wall_seconds", 0.125}};
    const nlohmann::json outputs = {{"diagnostics", "x.csv"}};
    const auto text = manifest_toml(cfg, stats, outputs);
    const auto back = parse_toml(text, "manifest");
    CHECK(to_json(back) == to_json(cfg));
    CHECK(manifest_toml(back, stats, outputs) == text);
    CHECK(text.find("[statistics]") != std::string::npos);
  }
  // 17 significant digits survive the text form exactly
  const nlohmann::json j = {{"x", 0.1 + 0.2}, {"y", std::numbers::pi}};
  const auto t = json_to_toml(j);
  CHECK(t.find("0.30000000000000004") != std::string::npos);
}
