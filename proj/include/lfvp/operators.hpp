#pragma once

#include "lfvp/legendre.hpp"
#include "lfvp/spectral.hpp"

#include <span>
#include <vector>

namespace lfvp {

/// Kinetic species with their velocity bases, plus an optional fixed neutralizing
/// background that only enters the k = 0 charge balance.
struct Plasma
{
  DomainConfig domain;
  std::vector<Species> species;
  std::vector<VelocityBasis> bases;
  /// diag(D_nu) per species
  std::vector<std::vector<double>> collisions;
  /// Charge density of the fixed background (e.g. +1 for immobile ions).
  double background_charge = 0.0;

  static Plasma build(const DomainConfig& domain, std::vector<Species> species, double background_charge = 0.0);

  int n_species() const { return static_cast<int>(species.size()); }
  SpectralState zero_state() const;
};

/// diag(D_nu): -nu n(n-1)(n-2) / ((N-1)(N-2)(N-3)).
std::vector<double> collision_diagonal(double nu, int n_modes);

/// Penalty matrix D_gamma for the species' penalty mode. The adaptive mode uses
/// `adaptive_value` on n >= 3.
std::vector<double> penalty_diagonal(const Species& species, int n_modes, double adaptive_value = 0.5);

/// (A c)_n = sigma_{n+1} c_{n+1} + sigma_n c_{n-1} + sigma_bar c_n
std::vector<cplx> apply_A(const VelocityBasis& basis, std::span<const cplx> column);

/// (B c)_n = sum_{i<n} sigma_{n,i} c_i, evaluated with running parity sums.
std::vector<cplx> apply_B(const VelocityBasis& basis, std::span<const cplx> column);

CoefficientMatrix apply_A(const VelocityBasis& basis, const CoefficientMatrix& c);
CoefficientMatrix apply_B(const VelocityBasis& basis, const CoefficientMatrix& c);

/// delta_v[f phi_n]_k = (F_b[k] phi_n(v_b) - F_a[k] phi_n(v_a)) / (v_b - v_a)
CoefficientMatrix boundary_term(const VelocityBasis& basis, const CoefficientMatrix& c);

enum class NeutralityCheck
{
  enforce,
  skip,
};

/// E_k = sum_s q^s (v_b - v_a) C^s_{0,k} / (epsilon0 2 pi i k / L), E_0 = 0.
/// With NeutralityCheck::enforce, throws ConfigError if the k = 0 charge
/// (background included) exceeds 1e-12 in magnitude.
FieldModes poisson_solve(const Plasma& plasma, const SpectralState& states,
                         NeutralityCheck check = NeutralityCheck::enforce);

/// Net k = 0 charge density sum_s q^s (v_b - v_a) Re C^s_{0,0} + background.
double net_charge(const Plasma& plasma, const SpectralState& states);

/// J^s_k = q (v_b - v_a) L (sigma_1 C_{1,k} + sigma_bar C_{0,k})
ModeVector current_density(const Plasma& plasma, int s, const CoefficientMatrix& c);

/// Q^s_k = (2 pi i k / L)^{-1} (v_b - v_a) L q^2 / m [E * delta_v[f phi_0]]_k, Q_0 = 0.
ModeVector ampere_boundary_Q(const Plasma& plasma, int s, const CoefficientMatrix& c, const FieldModes& field);

/// Per-species penalty diagonals.
using PenaltySet = std::vector<std::vector<double>>;

PenaltySet default_penalties(const Plasma& plasma);

/// dC/dt = -(2 pi i k / L) A C + (q/m) [E * (B C - D_gamma delta_v[f phi])] + D_nu C
SpectralState semi_discrete_rhs(const Plasma& plasma, const SpectralState& states, const FieldModes& field,
                                const PenaltySet& penalties);

/// Single-species right-hand side; `with_collisions` toggles the D_nu C term.
CoefficientMatrix species_rhs(const Plasma& plasma, int s, const CoefficientMatrix& c, const FieldModes& field,
                              std::span<const double> penalty, bool with_collisions = true);

/// Quantities entering the L2 identity for one species:
///   b_term          = 2 sum_k C_k^H [E * B C]_k
///   boundary_square = [E * delta_v[f^2]]_0
///   boundary_proj   = sum_k C_k^H [E * delta_v[f phi]]_k
///   boundary_rows   = sum_k conj(C_{n,k}) [E * delta_v[f phi]]_{n,k}, per n
struct BoundaryIdentityTerms
{
  cplx b_term;
  cplx boundary_square;
  cplx boundary_proj;
  std::vector<cplx> boundary_rows;
};

BoundaryIdentityTerms boundary_identity_terms(const VelocityBasis& basis, const CoefficientMatrix& c, const FieldModes& field);

struct AdaptiveGamma
{
  double gamma = 0.5;
  bool fallback = false;
  double imag_residue = 0.0;
};

/// gamma = sum_k C^H [E * B C]_k / sum_{n >= first_mode} sum_k conj(C) [E * delta_v]_{n,k};
/// falls back to 1/2 when the denominator is below 1e-14 in magnitude.
AdaptiveGamma adaptive_gamma(const VelocityBasis& basis, const CoefficientMatrix& c, const FieldModes& field,
                             int first_mode = 3);

} // namespace lfvp
