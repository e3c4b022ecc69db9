#pragma once

#include <span>
#include <vector>

namespace lfvp {

/// Rescaled Legendre basis phi_n(v) = sqrt(2n+1) L_n(eta(v)) on [v_a, v_b]
/// together with the recursion coefficients needed by the moment system.
///
/// Immutable after build_basis(); share freely across threads.
struct VelocityBasis
{
  double v_a = -1.0;
  double v_b = 1.0;
  int n_modes = 0;
  double sigma_bar = 0.0;
  /// sigma[n] for n in [0, n_modes + 1]; sigma[0] == 0.
  std::vector<double> sigma;
  /// sigma_{n,i}, dense n_modes x n_modes, row-major, explicit zeros.
  std::vector<double> sigma_deriv;
  std::vector<double> phi_at_va;
  std::vector<double> phi_at_vb;

  double width() const { return v_b - v_a; }
  double deriv(int n, int i) const { return sigma_deriv[static_cast<std::size_t>(n) * n_modes + i]; }
};

/// L_n(eta) by upward three-term recursion.
double eval_legendre(int n, double eta);

/// eta(v) = (2v - (v_a + v_b)) / (v_b - v_a).
double to_reference(const VelocityBasis& basis, double v);

double eval_phi(const VelocityBasis& basis, int n, double v);

/// phi_0(v) ... phi_{n_modes-1}(v) in one recursion sweep.
std::vector<double> eval_phi_all(const VelocityBasis& basis, double v);

/// Throws ConfigError when v_a >= v_b or n_modes < 4.
VelocityBasis build_basis(double v_a, double v_b, int n_modes);

/// v phi_n = c_plus phi_{n+1} + c_minus phi_{n-1} + c_zero phi_n
struct VPhiRecursion
{
  double c_plus;
  double c_minus;
  double c_zero;
};

VPhiRecursion recursion_vphi(const VelocityBasis& basis, int n);

/// Five coefficients of v^2 phi_n on phi_{n+2}, phi_{n+1}, phi_n, phi_{n-1}, phi_{n-2}.
struct V2PhiRecursion
{
  double c_plus2;
  double c_plus1;
  double c_zero;
  double c_minus1;
  double c_minus2;
};

V2PhiRecursion recursion_v2phi(const VelocityBasis& basis, int n);

/// Closed forms of int phi_n, int v phi_n, int v^2 phi_n over [v_a, v_b].
struct MomentIntegrals
{
  double i0;
  double i1;
  double i2;
};

MomentIntegrals moment_integrals(const VelocityBasis& basis, int n);

struct QuadratureRule
{
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule with n nodes on [a, b].
QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// max(2 n_modes, 128): the node count used for projections and checks.
int default_quadrature_nodes(int n_modes);

} // namespace lfvp
