#include "lfvp/integrator.hpp"

#include "lfvp/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>

namespace lfvp {

namespace {

double norm2(std::span<const double> v)
{
  double acc = 0.0;
  for (double x : v)
    acc += x * x;
  return std::sqrt(acc);
}

double dot(std::span<const double> a, std::span<const double> b)
{
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    acc += a[i] * b[i];
  return acc;
}

void merge_largest(double& slot, double value)
{
  if (std::abs(value) > std::abs(slot))
    slot = value;
}

} // namespace

void SolverConfig::validate() const
{
  auto fail = [](const std::string& what) { throw ConfigError("solver: " + what); };
  if (!(dt > 0.0) || !std::isfinite(dt))
    fail("dt must be positive");
  if (!(t_final >= 0.0) || !std::isfinite(t_final))
    fail("t_final must be non-negative");
  if (!(newton_abs_tol > 0.0) || !(newton_rel_tol > 0.0) || !(gmres_rel_tol > 0.0))
    fail("tolerances must be positive");
  if (newton_max_iters < 1 || gmres_max_iters < 1)
    fail("iteration limits must be at least 1");
  if (gmres_restart < 1)
    fail("gmres_restart must be at least 1");
  if (!(fd_epsilon_scale > 0.0))
    fail("fd_epsilon_scale must be positive");
}

SpectralState cn_residual(const Plasma& plasma, double dt, const SpectralState& old_states,
                          const SpectralState& new_guess, const PenaltySet& penalties)
{
  SpectralState avg = new_guess;
  for (int s = 0; s < plasma.n_species(); ++s) {
    auto a = avg[s].data();
    const auto o = old_states[s].data();
    for (std::size_t i = 0; i < a.size(); ++i)
      a[i] = 0.5 * (a[i] + o[i]);
  }
  const auto field = poisson_solve(plasma, avg, NeutralityCheck::skip);
  auto out = semi_discrete_rhs(plasma, avg, field, penalties);
  const double inv_dt = 1.0 / dt;
  for (int s = 0; s < plasma.n_species(); ++s) {
    auto r = out[s].data();
    const auto n = new_guess[s].data();
    const auto o = old_states[s].data();
    for (std::size_t i = 0; i < r.size(); ++i)
      r[i] = (n[i] - o[i]) * inv_dt - r[i];
  }
  return out;
}

PenaltySet step_penalties(const Plasma& plasma, const SpectralState& states, const FieldModes& field)
{
  PenaltySet out;
  const int nl = plasma.domain.n_legendre;
  for (int s = 0; s < plasma.n_species(); ++s) {
    const auto& sp = plasma.species[s];
    if (sp.penalty_mode == PenaltyMode::adaptive) {
      const auto g = adaptive_gamma(plasma.bases[s], states[s], field);
      out.push_back(penalty_diagonal(sp, nl, g.gamma));
    } else {
      out.push_back(penalty_diagonal(sp, nl));
    }
  }
  return out;
}

std::vector<double> pack(const SpectralState& states)
{
  std::size_t total = 0;
  for (const auto& c : states)
    total += 2 * c.data().size();
  std::vector<double> x;
  x.reserve(total);
  for (const auto& c : states)
    for (const auto& z : c.data()) {
      x.push_back(z.real());
      x.push_back(z.imag());
    }
  return x;
}

void unpack(std::span<const double> x, SpectralState& states)
{
  std::size_t i = 0;
  for (auto& c : states)
    for (auto& z : c.data()) {
      z = cplx(x[i], x[i + 1]);
      i += 2;
    }
}

GmresResult gmres(const LinearOperator& apply, std::span<const double> b, double rel_tol, int restart,
                  int max_iters, const Preconditioner& precond)
{
  const std::size_t n = b.size();
  GmresResult out;
  out.x.assign(n, 0.0);
  const double b_norm = norm2(b);
  if (b_norm == 0.0) {
    out.converged = true;
    return out;
  }
  const double target = rel_tol * b_norm;
  const int m = restart;

  std::vector<double> r(b.begin(), b.end());
  std::vector<std::vector<double>> v(m + 1, std::vector<double>(n));
  std::vector<std::vector<double>> h(m + 1, std::vector<double>(m, 0.0));
  std::vector<double> cs(m), sn(m), g(m + 1), y(m), z(n), w(n);

  double r_norm = b_norm;
  while (true) {
    if (r_norm <= target) {
      out.converged = true;
      break;
    }
    if (out.iterations >= max_iters)
      break;

    for (std::size_t i = 0; i < n; ++i)
      v[0][i] = r[i] / r_norm;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = r_norm;

    int j = 0;
    for (; j < m && out.iterations < max_iters; ++j) {
      if (precond)
        precond(v[j], z);
      else
        z = v[j];
      apply(z, w);
      ++out.iterations;
      for (int i = 0; i <= j; ++i) {
        h[i][j] = dot(w, v[i]);
        for (std::size_t l = 0; l < n; ++l)
          w[l] -= h[i][j] * v[i][l];
      }
      h[j + 1][j] = norm2(w);
      const bool breakdown = h[j + 1][j] == 0.0;
      if (!breakdown)
        for (std::size_t l = 0; l < n; ++l)
          v[j + 1][l] = w[l] / h[j + 1][j];

      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
        h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
        h[i][j] = t;
      }
      const double denom = std::hypot(h[j][j], h[j + 1][j]);
      cs[j] = denom == 0.0 ? 1.0 : h[j][j] / denom;
      sn[j] = denom == 0.0 ? 0.0 : h[j + 1][j] / denom;
      h[j][j] = denom;
      h[j + 1][j] = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];

      if (std::abs(g[j + 1]) <= target || breakdown) {
        ++j;
        break;
      }
    }

    // back substitution on the j x j triangle
    for (int i = j - 1; i >= 0; --i) {
      double acc = g[i];
      for (int l = i + 1; l < j; ++l)
        acc -= h[i][l] * y[l];
      y[i] = h[i][i] == 0.0 ? 0.0 : acc / h[i][i];
    }
    std::fill(w.begin(), w.end(), 0.0);
    for (int i = 0; i < j; ++i)
      for (std::size_t l = 0; l < n; ++l)
        w[l] += y[i] * v[i][l];
    if (precond)
      precond(w, z);
    else
      z = w;
    for (std::size_t l = 0; l < n; ++l)
      out.x[l] += z[l];

    apply(out.x, w);
    for (std::size_t l = 0; l < n; ++l)
      r[l] = b[l] - w[l];
    const double new_norm = norm2(r);
    if (!(new_norm < r_norm) && !(new_norm <= target)) {
      r_norm = new_norm;
      break; // stagnation
    }
    r_norm = new_norm;
  }
  out.residual_norm = r_norm;
  out.converged = out.converged || r_norm <= target;
  return out;
}

StepResult jfnk_step(const Plasma& plasma, const SolverConfig& config, const SpectralState& old_states,
                     const Preconditioner& precond)
{
  StepResult result;
  const auto old_field = poisson_solve(plasma, old_states, NeutralityCheck::skip);
  result.penalties = step_penalties(plasma, old_states, old_field);

  SpectralState work = old_states;
  auto residual = [&](std::span<const double> x) {
    unpack(x, work);
    return pack(cn_residual(plasma, config.dt, old_states, work, result.penalties));
  };
  auto check_finite = [&](double norm, int iter) {
    if (!std::isfinite(norm)) {
      std::ostringstream msg;
      msg << "non-finite Crank-Nicolson residual at Newton iteration " << iter;
      throw SolverError(msg.str());
    }
  };

  std::vector<double> x = pack(old_states);
  std::vector<double> r = residual(x);
  double r_norm = norm2(r);
  check_finite(r_norm, 0);
  result.initial_residual_norm = r_norm;
  const double target = std::max(config.newton_abs_tol, config.newton_rel_tol * r_norm);
  const double sqrt_eps = std::sqrt(std::numeric_limits<double>::epsilon());

  std::vector<double> rhs(x.size());
  std::vector<double> probe(x.size());
  while (r_norm > target && result.newton_iters < config.newton_max_iters) {
    const double x_norm = norm2(x);
    LinearOperator jv = [&](std::span<const double> u, std::span<double> out) {
      const double u_norm = norm2(u);
      if (u_norm == 0.0) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
      }
      const double eps = config.fd_epsilon_scale * sqrt_eps * (1.0 + x_norm) / u_norm;
      for (std::size_t i = 0; i < x.size(); ++i)
        probe[i] = x[i] + eps * u[i];
      const auto rp = residual(probe);
      for (std::size_t i = 0; i < x.size(); ++i)
        out[i] = (rp[i] - r[i]) / eps;
    };
    for (std::size_t i = 0; i < r.size(); ++i)
      rhs[i] = -r[i];
    const auto lin = gmres(jv, rhs, config.gmres_rel_tol, config.gmres_restart, config.gmres_max_iters, precond);
    result.gmres_iters_total += lin.iterations;
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] += lin.x[i];
    ++result.newton_iters;
    r = residual(x);
    r_norm = norm2(r);
    check_finite(r_norm, result.newton_iters);
  }

  result.final_residual_norm = r_norm;
  result.converged = r_norm <= target;
  if (!result.converged) {
    std::ostringstream msg;
    msg << "Newton did not converge in " << result.newton_iters << " iterations (residual " << r_norm
        << ", target " << target << ")";
    result.message = msg.str();
  }
  result.states = old_states;
  unpack(x, result.states);
  for (auto& c : result.states)
    symmetrize(c);
  return result;
}

RunResult run(const Plasma& plasma, const SolverConfig& config, const SpectralState& initial,
              const RunOptions& options)
{
  config.validate();
  if (options.cadence < 1)
    throw ConfigError("run: output cadence must be at least 1");
  const auto start = std::chrono::steady_clock::now();

  RunResult out;
  const double ratio = config.t_final / config.dt;
  out.steps_planned = static_cast<int>(std::llround(ratio));
  if (std::abs(ratio - out.steps_planned) > 1e-9 * std::max(1.0, ratio)) {
    std::ostringstream msg;
    msg << "t_final " << config.t_final << " is not a multiple of dt " << config.dt << "; running "
        << out.steps_planned << " steps to t = " << out.steps_planned * config.dt;
    out.warnings.push_back(msg.str());
    std::cerr << "warning: " << msg.str() << '\n';
  }
  const int n_x = options.grid_points > 0 ? options.grid_points : default_grid_points(plasma.domain);

  std::vector<double> snapshots = options.snapshot_times;
  std::sort(snapshots.begin(), snapshots.end());
  std::size_t next_snapshot = 0;
  auto emit_snapshots = [&](double t, const SpectralState& states) {
    while (next_snapshot < snapshots.size() && t >= snapshots[next_snapshot] - 1e-9 * config.dt) {
      if (options.on_snapshot)
        options.on_snapshot(t, states);
      ++next_snapshot;
    }
  };

  bool warned_imag = false;
  auto emit = [&](DiagnosticsRecord rec) {
    if (rec.imag_residue > 1e-12 && !warned_imag) {
      std::ostringstream msg;
      msg << "imaginary part " << rec.imag_residue << " discarded from real diagnostics at t = " << rec.t;
      out.warnings.push_back(msg.str());
      std::cerr << "warning: " << msg.str() << '\n';
      warned_imag = true;
    }
    if (options.on_record)
      options.on_record(rec);
    out.records.push_back(std::move(rec));
  };

  SpectralState states = initial;
  FieldModes field = poisson_solve(plasma, states, NeutralityCheck::skip);
  emit(make_record(plasma, 0.0, states, initial, options.field_modes, n_x));
  emit_snapshots(0.0, states);

  Balances pending;
  auto& stats = out.statistics;
  for (int step = 1; step <= out.steps_planned; ++step) {
    StepResult res;
    try {
      res = jfnk_step(plasma, config, states);
    } catch (const SolverError& e) {
      out.failed_step = step;
      out.failure = e.what();
      break;
    }
    stats.newton_iters += res.newton_iters;
    stats.gmres_iters += res.gmres_iters_total;
    stats.max_newton_iters = std::max(stats.max_newton_iters, res.newton_iters);
    stats.max_final_residual = std::max(stats.max_final_residual, res.final_residual_norm);
    if (!res.converged) {
      out.failed_step = step;
      out.failure = res.message;
      break;
    }

    const auto new_field = poisson_solve(plasma, res.states, NeutralityCheck::skip);
    const auto bal = discrete_balances(plasma, states, res.states, field, new_field, config.dt, res.penalties);
    merge_largest(pending.mass, bal.mass);
    merge_largest(pending.momentum, bal.momentum);
    merge_largest(pending.energy, bal.energy);
    pending.ampere = std::max(pending.ampere, bal.ampere);
    pending.current_k0 = bal.current_k0;

    const double t = step * config.dt;
    if (options.on_step)
      options.on_step(StepEvent{step, t, &states, &res, &field, &new_field, bal});

    states = std::move(res.states);
    field = new_field;
    stats.steps_taken = step;
    out.t_reached = t;

    if (step % options.cadence == 0 || step == out.steps_planned) {
      auto rec = make_record(plasma, t, states, initial, options.field_modes, n_x);
      rec.balances = pending;
      pending = Balances{};
      emit(std::move(rec));
    }
    emit_snapshots(t, states);
  }

  out.completed = !out.failed_step.has_value();
  out.final_states = std::move(states);
  stats.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

} // namespace lfvp
