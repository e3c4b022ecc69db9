#pragma once

#include "lfvp/operators.hpp"

#include <array>
#include <ostream>
#include <string>
#include <vector>

namespace lfvp {

// Conserved quantities. Nominally real values are returned as real parts; the
// discarded imaginary parts are reported through `imag_residue` where available.

/// M^s = m (v_b - v_a) L Re C_{0,0}
double mass(const Plasma& plasma, int s, const CoefficientMatrix& c);

/// P^s = m (v_b - v_a) L (sigma_1 C_{1,0} + sigma_bar C_{0,0})
double species_momentum(const Plasma& plasma, int s, const CoefficientMatrix& c);

struct Momentum
{
  std::vector<double> per_species;
  double total = 0.0;
};

Momentum momentum(const Plasma& plasma, const SpectralState& states);

/// E^s_kin = (m/2)(v_b - v_a) L (sigma_2 sigma_1 C_{2,0} + 2 sigma_1 sigma_bar C_{1,0}
///           + (sigma_1^2 + sigma_bar^2) C_{0,0})
double kinetic_energy(const Plasma& plasma, int s, const CoefficientMatrix& c);

/// E_pot = (epsilon0 L / 2) sum_k E_k E_{-k}, the field energy of the whole box.
double potential_energy(const Plasma& plasma, const FieldModes& field);

struct Energy
{
  std::vector<double> kinetic;
  double potential = 0.0;
  double total = 0.0;
};

Energy energy(const Plasma& plasma, const SpectralState& states, const FieldModes& field);

/// Sum_{n,k} |C_{n,k}|^2
double l2_norm_sq(const CoefficientMatrix& c);
/// Ratio to the initial value; throws std::domain_error when the initial norm is zero.
double relative_l2(const CoefficientMatrix& c, const CoefficientMatrix& c0);

/// max |f| at v_a and v_b over x_j = j L / n_x.
double boundary_max(const DomainConfig& domain, const VelocityBasis& basis, const CoefficientMatrix& c, int n_x);

/// Boundary contributions of one Crank-Nicolson step tau -> tau+1. With
/// Esum = E^tau + E^{tau+1} and fsum = f^tau + f^{tau+1}:
///   b_n0[s][n] = -G_n (q/4)(v_b - v_a) L [Esum * delta_v[fsum phi_n]]_0,  n = 0, 1, 2
///   b_kin[s]   = (1/2)(sigma_2 sigma_1 b_20 + 2 sigma_1 sigma_bar b_10 + (sigma_1^2 + sigma_bar^2) b_00)
///   b_amp[k]   = -sum_s G_0 (v_b - v_a) L q^2/(4m) (2 pi i k/L)^{-1} [Esum * delta_v[fsum phi_0]]_k
///   b_pot      = (1/2) sum_k Esum_{-k} b_amp[k]
struct StepBoundaryTerms
{
  std::vector<std::array<double, 3>> b_n0;
  std::vector<double> b_kin;
  ModeVector b_amp;
  double b_pot = 0.0;
};

StepBoundaryTerms step_boundary_terms(const Plasma& plasma, const SpectralState& old_states,
                                      const SpectralState& new_states, const FieldModes& old_field,
                                      const FieldModes& new_field, const PenaltySet& penalties);

/// Residuals of the fully discrete balance laws across one step.
///   mass     : largest-magnitude species residual M(tau+1) - M(tau) - dt b_00
///   momentum : total P(tau+1) - P(tau) - dt sum_s (sigma_1 b_10 + sigma_bar b_00)
///   energy   : E_tot(tau+1) - E_tot(tau) - dt (sum_s b_kin + b_pot)
///   ampere   : max_k |epsilon0 L (E^{tau+1} - E^tau)_k + (dt/2) sum_s (J^{tau+1} + J^tau)_k - dt b_amp_k|
///   current_k0 : sum_s Re J^s_0 at tau+1, the Ampere constant C_A
struct Balances
{
  double mass = 0.0;
  double momentum = 0.0;
  double energy = 0.0;
  double ampere = 0.0;
  double current_k0 = 0.0;
};

Balances discrete_balances(const Plasma& plasma, const SpectralState& old_states, const SpectralState& new_states,
                           const FieldModes& old_field, const FieldModes& new_field, double dt,
                           const PenaltySet& penalties);

/// d/dt sum |C|^2 evaluated two ways for one species.
///   lhs       = 2 Re sum C^H rhs
///   predicted = (q/m) (X - 2 Re sum_n G_n W_n) - 2 sum_n |D_n| sum_k |C_{n,k}|^2
/// with X = [E * delta_v[f^2]]_0 and W_n = sum_k conj(C_{n,k}) [E * delta_v[f phi_n]]_{n,k}.
/// G = 1 on every mode reproduces the unpenalized law -(q/m) X - 2 sum |D| |C|^2;
/// `unpenalized` holds that value for comparison.
struct StabilityCheck
{
  double lhs = 0.0;
  double predicted = 0.0;
  double discrepancy = 0.0;
  double unpenalized = 0.0;
  double collisional = 0.0;
};

StabilityCheck stability_identity_check(const Plasma& plasma, int s, const CoefficientMatrix& c,
                                        const FieldModes& field, std::span<const double> penalty);

struct SpeciesDiagnostics
{
  double mass = 0.0;
  double momentum = 0.0;
  double kinetic_energy = 0.0;
  double l2_rel = 1.0;
  double boundary_max = 0.0;
};

struct DiagnosticsRecord
{
  double t = 0.0;
  std::vector<SpeciesDiagnostics> species;
  double potential_energy = 0.0;
  double total_energy = 0.0;
  double total_momentum = 0.0;
  std::vector<double> field_abs;
  Balances balances;
  /// Largest imaginary part discarded while forming the real diagnostics.
  double imag_residue = 0.0;
};

/// Record at time t. `initial` provides the L2 reference; balance fields are left zero.
DiagnosticsRecord make_record(const Plasma& plasma, double t, const SpectralState& states,
                              const SpectralState& initial, const std::vector<int>& field_modes, int n_x);

std::vector<std::string> csv_columns(const Plasma& plasma, const std::vector<int>& field_modes);
void write_csv_header(std::ostream& out, const Plasma& plasma, const std::vector<int>& field_modes);
void write_csv_row(std::ostream& out, const DiagnosticsRecord& record);

} // namespace lfvp
