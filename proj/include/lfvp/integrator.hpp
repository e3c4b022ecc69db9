#pragma once

#include "lfvp/diagnostics.hpp"
#include "lfvp/operators.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace lfvp {

struct SolverConfig
{
  double dt = 0.05;
  double t_final = 1.0;
  double newton_abs_tol = 1e-12;
  double newton_rel_tol = 1e-10;
  int newton_max_iters = 25;
  double gmres_rel_tol = 1e-6;
  int gmres_restart = 30;
  /// Cap on inner iterations per Newton step, summed over restarts.
  int gmres_max_iters = 600;
  double fd_epsilon_scale = 1.0;

  void validate() const;
};

/// Crank-Nicolson residual
///   R = (C^{tau+1} - C^tau)/dt - rhs((C^{tau+1} + C^tau)/2, E((C^{tau+1} + C^tau)/2)),
/// which equals the two-level form since the field is linear in C.
SpectralState cn_residual(const Plasma& plasma, double dt, const SpectralState& old_states,
                          const SpectralState& new_guess, const PenaltySet& penalties);

/// Penalty diagonals for the step leaving `states`; adaptive species evaluate
/// their gamma from `states` and its field.
PenaltySet step_penalties(const Plasma& plasma, const SpectralState& states, const FieldModes& field);

// Real-ified unknowns: species-major, then n, then k, with (Re, Im) interleaved.
std::vector<double> pack(const SpectralState& states);
void unpack(std::span<const double> x, SpectralState& states);

/// Applies y = M^{-1} x for right preconditioning.
using Preconditioner = std::function<void(std::span<const double> x, std::span<double> y)>;
using LinearOperator = std::function<void(std::span<const double> x, std::span<double> y)>;

struct GmresResult
{
  std::vector<double> x;
  int iterations = 0;
  double residual_norm = 0.0;
  bool converged = false;
};

/// Restarted GMRES(m) with Givens rotations, zero initial guess, stopping when
/// ||b - A x|| <= rel_tol ||b||.
GmresResult gmres(const LinearOperator& apply, std::span<const double> b, double rel_tol, int restart,
                  int max_iters, const Preconditioner& precond = {});

struct StepResult
{
  SpectralState states;
  PenaltySet penalties;
  int newton_iters = 0;
  int gmres_iters_total = 0;
  double initial_residual_norm = 0.0;
  double final_residual_norm = 0.0;
  bool converged = false;
  std::string message;
};

/// One Crank-Nicolson step solved by Jacobian-free Newton-Krylov. Throws
/// SolverError when the residual stops being finite; reports non-convergence
/// through `converged`.
StepResult jfnk_step(const Plasma& plasma, const SolverConfig& config, const SpectralState& old_states,
                     const Preconditioner& precond = {});

struct RunStatistics
{
  int steps_taken = 0;
  long newton_iters = 0;
  long gmres_iters = 0;
  int max_newton_iters = 0;
  double max_final_residual = 0.0;
  double wall_seconds = 0.0;
};

/// Everything run() knows about one accepted step.
struct StepEvent
{
  int step = 0;
  double t = 0.0;
  const SpectralState* old_states = nullptr;
  const StepResult* result = nullptr;
  const FieldModes* old_field = nullptr;
  const FieldModes* new_field = nullptr;
  Balances balances;
};

struct RunOptions
{
  int cadence = 1;
  std::vector<int> field_modes{1};
  /// Diagnostics x-grid; 0 selects 4 N_F + 2.
  int grid_points = 0;
  std::function<void(const DiagnosticsRecord&)> on_record;
  std::function<void(const StepEvent&)> on_step;
  /// Snapshot requests; the callback fires at the first step with t >= requested time.
  std::vector<double> snapshot_times;
  std::function<void(double t, const SpectralState&)> on_snapshot;
};

struct RunResult
{
  SpectralState final_states;
  std::vector<DiagnosticsRecord> records;
  RunStatistics statistics;
  double t_reached = 0.0;
  int steps_planned = 0;
  bool completed = false;
  std::optional<int> failed_step;
  std::string failure;
  std::vector<std::string> warnings;
};

/// Advances round(t_final/dt) steps. Records carry, in their balance fields, the
/// largest-magnitude residual over the steps since the previous record. A rejected
/// step ends the run with `failed_step` set; records up to that point are kept.
RunResult run(const Plasma& plasma, const SolverConfig& config, const SpectralState& initial,
              const RunOptions& options = {});

} // namespace lfvp
