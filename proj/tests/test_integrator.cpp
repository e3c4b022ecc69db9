#include "lfvp/config.hpp"
#include "lfvp/errors.hpp"
#include "lfvp/integrator.hpp"
#include "oracles.hpp"

#include <Eigen/Dense>
#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace lfvp;

namespace {

Setup small_landau(int nl = 64, int nf = 8)
{
  auto cfg = preset("landau");
  cfg.domain.n_legendre = nl;
  cfg.domain.n_fourier = nf;
  return build_setup(cfg);
}

} // namespace

TEST_CASE("solver configuration validation")
{
  SolverConfig c;
  CHECK_NOTHROW(c.validate());
  c.dt = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.t_final = -1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.gmres_restart = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("pack and unpack are inverse")
{
  std::mt19937 rng(1);
  SpectralState s{oracle::random_state(5, 2, rng), oracle::random_state(3, 2, rng)};
  const auto x = pack(s);
  CHECK(x.size() == 2 * (5 + 3) * 5);
  SpectralState back{CoefficientMatrix(5, 2), CoefficientMatrix(3, 2)};
  unpack(x, back);
  for (int i = 0; i < 2; ++i)
    CHECK(std::equal(s[i].data().begin(), s[i].data().end(), back[i].data().begin()));
}

TEST_CASE("GMRES agrees with a dense LU solve")
{
  const int n = 40;
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      a(i, j) = u(rng) * 0.3 + (i == j ? 4.0 + i * 0.1 : 0.0);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i)
    b(i) = u(rng);
  const Eigen::VectorXd ref = a.partialPivLu().solve(b);

  auto apply = [&](std::span<const double> x, std::span<double> y) {
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), n);
    Eigen::Map<Eigen::VectorXd> yv(y.data(), n);
    yv = a * xv;
  };
  std::vector<double> rhs(b.data(), b.data() + n);

  for (int restart : {5, 40}) {
    const auto r = gmres(apply, rhs, 1e-13, restart, 2000);
    CHECK(r.converged);
    double err = 0.0;
    for (int i = 0; i < n; ++i)
      err = std::max(err, std::abs(r.x[i] - ref(i)));
    CHECK(err < 1e-11);
  }

  auto jacobi = [&](std::span<const double> x, std::span<double> y) {
    for (int i = 0; i < n; ++i)
      y[i] = x[i] / a(i, i);
  };
  const auto plain = gmres(apply, rhs, 1e-13, 40, 2000);
  const auto pre = gmres(apply, rhs, 1e-13, 40, 2000, jacobi);
  CHECK(pre.converged);
  CHECK(pre.iterations <= plain.iterations);
  double err = 0.0;
  for (int i = 0; i < n; ++i)
    err = std::max(err, std::abs(pre.x[i] - ref(i)));
  CHECK(err < 1e-11);

  const auto capped = gmres(apply, rhs, 1e-13, 3, 4);
  CHECK_FALSE(capped.converged);
  CHECK(capped.iterations == 4);
}

TEST_CASE("Crank-Nicolson residual vanishes on an equilibrium")
{
  DomainConfig d;
  d.length = 2.0 * std::numbers::pi;
  d.n_legendre = 32;
  d.n_fourier = 4;
  const auto plasma = Plasma::build(d, {Species{}}, 1.0);
  const auto b = plasma.bases[0];
  SpectralState s{project_initial(d, b, InitialProfile::maxwellian(1.0, 0.0, 0.0, 1))};
  const auto pen = default_penalties(plasma);
  const auto r = cn_residual(plasma, 0.1, s, s, pen);
  double worst = 0.0;
  for (auto z : r[0].data())
    worst = std::max(worst, std::abs(z));
  CHECK(worst < 1e-13);

  SolverConfig cfg;
  cfg.dt = 0.1;
  const auto step = jfnk_step(plasma, cfg, s);
  CHECK(step.converged);
  CHECK(step.newton_iters == 0);
}

TEST_CASE("uncharged species: one step equals the direct linear Crank-Nicolson solve")
{
  DomainConfig d;
  d.length = 3.0;
  d.v_a = -4.0;
  d.v_b = 4.0;
  d.n_legendre = 8;
  d.n_fourier = 2;
  Species n;
  n.charge = 0.0;
  n.nu = 0.5;
  const auto plasma = Plasma::build(d, {n}, 0.0);
  std::mt19937 rng(3);
  SpectralState old{oracle::random_state(8, 2, rng, 0.1, true)};

  SolverConfig cfg;
  cfg.dt = 0.2;
  cfg.gmres_rel_tol = 1e-13;
  cfg.newton_abs_tol = 1e-13;
  cfg.newton_rel_tol = 1e-13;
  const auto step = jfnk_step(plasma, cfg, old);
  REQUIRE(step.converged);
  CHECK(step.newton_iters <= 2);

  const auto& b = plasma.bases[0];
  for (int k = -2; k <= 2; ++k) {
    Eigen::MatrixXcd lop = Eigen::MatrixXcd::Zero(8, 8);
    for (int j = 0; j < 8; ++j) {
      std::vector<cplx> e(8);
      e[j] = 1.0;
      const auto ae = apply_A(b, e);
      for (int i = 0; i < 8; ++i)
        lop(i, j) = -cplx(0.0, 2.0 * std::numbers::pi * k / d.length) * ae[i];
      lop(j, j) += plasma.collisions[0][j];
    }
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(8, 8);
    Eigen::VectorXcd c0(8);
    for (int i = 0; i < 8; ++i)
      c0(i) = old[0](i, k);
    const Eigen::VectorXcd c1 = (id / cfg.dt - 0.5 * lop).partialPivLu().solve((id / cfg.dt + 0.5 * lop) * c0);
    for (int i = 0; i < 8; ++i)
      CHECK(std::abs(step.states[0](i, k) - c1(i)) < 1e-12);
  }
}

TEST_CASE("a Landau step converges within ten Newton iterations")
{
  const auto setup = small_landau();
  SolverConfig cfg;
  cfg.dt = 0.05;
  const auto step = jfnk_step(setup.plasma, cfg, setup.initial);
  CHECK(step.converged);
  CHECK(step.newton_iters >= 1);
  CHECK(step.newton_iters <= 10);
  CHECK(step.final_residual_norm <= std::max(cfg.newton_abs_tol, cfg.newton_rel_tol * step.initial_residual_norm));
  CHECK(hermitian_defect(step.states[0]) == 0.0);
}

TEST_CASE("runs are deterministic")
{
  const auto setup = small_landau(32, 4);
  SolverConfig cfg;
  cfg.dt = 0.05;
  cfg.t_final = 0.5;
  const auto a = run(setup.plasma, cfg, setup.initial);
  const auto b = run(setup.plasma, cfg, setup.initial);
  REQUIRE(a.completed);
  CHECK(a.records.size() == 11);
  CHECK(a.statistics.newton_iters == b.statistics.newton_iters);
  CHECK(std::equal(a.final_states[0].data().begin(), a.final_states[0].data().end(),
                   b.final_states[0].data().begin()));
}

TEST_CASE("run bookkeeping")
{
  const auto setup = small_landau(32, 4);

  SUBCASE("zero steps record only the initial state")
  {
    SolverConfig cfg;
    cfg.t_final = 0.0;
    const auto r = run(setup.plasma, cfg, setup.initial);
    CHECK(r.completed);
    CHECK(r.steps_planned == 0);
    REQUIRE(r.records.size() == 1);
    CHECK(r.records[0].t == 0.0);
    CHECK(r.records[0].species[0].l2_rel == 1.0);
  }

  SUBCASE("t_final off the dt grid is rounded with a warning")
  {
    SolverConfig cfg;
    cfg.dt = 0.03;
    cfg.t_final = 0.1;
    const auto r = run(setup.plasma, cfg, setup.initial);
    CHECK(r.steps_planned == 3);
    CHECK(r.warnings.size() == 1);
    CHECK(r.t_reached == doctest::Approx(0.09));
  }

  SUBCASE("cadence thins records but keeps the final one")
  {
    SolverConfig cfg;
    cfg.t_final = 0.35;
    RunOptions opt;
    opt.cadence = 3;
    opt.field_modes = {1, 2};
    const auto r = run(setup.plasma, cfg, setup.initial, opt);
    REQUIRE(r.records.size() == 4);
    CHECK(r.records[1].t == doctest::Approx(0.15));
    CHECK(r.records.back().t == doctest::Approx(0.35));
    CHECK(r.records.back().field_abs.size() == 2);
  }

  SUBCASE("a step that cannot converge is reported with its index")
  {
    SolverConfig cfg;
    cfg.t_final = 0.2;
    cfg.newton_max_iters = 1;
    cfg.newton_abs_tol = 1e-300;
    cfg.newton_rel_tol = 1e-300;
    const auto r = run(setup.plasma, cfg, setup.initial);
    CHECK_FALSE(r.completed);
    REQUIRE(r.failed_step.has_value());
    CHECK(*r.failed_step == 1);
    CHECK_FALSE(r.failure.empty());
    CHECK(r.records.size() == 1);
  }

  SUBCASE("snapshot callback fires at the first step past each request")
  {
    SolverConfig cfg;
    cfg.t_final = 0.2;
    RunOptions opt;
    opt.snapshot_times = {0.12, 0.0};
    std::vector<double> seen;
    opt.on_snapshot = [&](double t, const SpectralState&) { seen.push_back(t); };
    run(setup.plasma, cfg, setup.initial, opt);
    REQUIRE(seen.size() == 2);
    CHECK(seen[0] == 0.0);
    CHECK(seen[1] == doctest::Approx(0.15));
  }
}

TEST_CASE("adaptive penalty is evaluated per step")
{
  auto cfg = preset("landau");
  cfg.domain.n_legendre = 32;
  cfg.domain.n_fourier = 4;
  cfg.species[0].species.penalty_mode = PenaltyMode::adaptive;
  const auto setup = build_setup(cfg);
  const auto field = poisson_solve(setup.plasma, setup.initial);
  const auto pen = step_penalties(setup.plasma, setup.initial, field);
  const auto g = adaptive_gamma(setup.plasma.bases[0], setup.initial[0], field);
  CHECK(pen[0][0] == 0.0);
  CHECK(pen[0][3] == g.gamma);
  CHECK(pen[0][31] == g.gamma);
}
