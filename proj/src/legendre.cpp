#include "lfvp/legendre.hpp"

#include "lfvp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace lfvp {

double eval_legendre(int n, double eta)
{
  if (n == 0)
    return 1.0;
  if (n == 1)
    return eta;
  double p_prev = 1.0;
  double p = eta;
  for (int j = 1; j < n; ++j) {
    // (j+1) L_{j+1} = (2j+1) eta L_j - j L_{j-1}
    const double p_next = ((2.0 * j + 1.0) * eta * p - j * p_prev) / (j + 1.0);
    p_prev = p;
    p = p_next;
  }
  return p;
}

double to_reference(const VelocityBasis& basis, double v)
{
  return (2.0 * v - (basis.v_a + basis.v_b)) / (basis.v_b - basis.v_a);
}

double eval_phi(const VelocityBasis& basis, int n, double v)
{
  return std::sqrt(2.0 * n + 1.0) * eval_legendre(n, to_reference(basis, v));
}

std::vector<double> eval_phi_all(const VelocityBasis& basis, double v)
{
  const double eta = to_reference(basis, v);
  std::vector<double> out(basis.n_modes);
  double p_prev = 0.0;
  double p = 1.0;
  for (int n = 0; n < basis.n_modes; ++n) {
    out[n] = std::sqrt(2.0 * n + 1.0) * p;
    const double p_next = n == 0 ? eta : ((2.0 * n + 1.0) * eta * p - n * p_prev) / (n + 1.0);
    p_prev = p;
    p = p_next;
  }
  return out;
}

VelocityBasis build_basis(double v_a, double v_b, int n_modes)
{
  if (!(v_a < v_b))
    throw ConfigError("velocity basis: require v_a < v_b, got [" + std::to_string(v_a) + ", " +
                      std::to_string(v_b) + "]");
  if (n_modes < 4)
    throw ConfigError("velocity basis: require at least 4 Legendre modes, got " + std::to_string(n_modes));

  VelocityBasis basis;
  basis.v_a = v_a;
  basis.v_b = v_b;
  basis.n_modes = n_modes;
  basis.sigma_bar = 0.5 * (v_a + v_b);

  const double half_width = 0.5 * (v_b - v_a);
  basis.sigma.assign(n_modes + 2, 0.0);
  for (int n = 1; n < n_modes + 2; ++n)
    basis.sigma[n] = half_width * n / std::sqrt((2.0 * n + 1.0) * (2.0 * n - 1.0));

  basis.sigma_deriv.assign(static_cast<std::size_t>(n_modes) * n_modes, 0.0);
  for (int n = 1; n < n_modes; ++n)
    for (int i = n - 1; i >= 0; i -= 2)
      basis.sigma_deriv[static_cast<std::size_t>(n) * n_modes + i] =
          2.0 * std::sqrt((2.0 * n + 1.0) * (2.0 * i + 1.0)) / (v_b - v_a);

  basis.phi_at_va = eval_phi_all(basis, v_a);
  basis.phi_at_vb = eval_phi_all(basis, v_b);
  return basis;
}

VPhiRecursion recursion_vphi(const VelocityBasis& basis, int n)
{
  return {basis.sigma[n + 1], basis.sigma[n], basis.sigma_bar};
}

V2PhiRecursion recursion_v2phi(const VelocityBasis& basis, int n)
{
  const auto& s = basis.sigma;
  const double sb = basis.sigma_bar;
  return {
      s[n + 2] * s[n + 1],
      2.0 * s[n + 1] * sb,
      s[n + 1] * s[n + 1] + s[n] * s[n] + sb * sb,
      2.0 * s[n] * sb,
      n >= 1 ? s[n] * s[n - 1] : 0.0,
  };
}

MomentIntegrals moment_integrals(const VelocityBasis& basis, int n)
{
  const double w = basis.width();
  const double s1 = basis.sigma[1];
  const double s2 = basis.sigma[2];
  const double sb = basis.sigma_bar;
  MomentIntegrals out{0.0, 0.0, 0.0};
  switch (n) {
  case 0:
    out = {w, w * sb, w * (s1 * s1 + sb * sb)};
    break;
  case 1:
    out = {0.0, w * s1, w * 2.0 * s1 * sb};
    break;
  case 2:
    out = {0.0, 0.0, w * s2 * s1};
    break;
  default:
    break;
  }
  return out;
}

QuadratureRule gauss_legendre(int n, double a, double b)
{
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      dp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z_prev = z;
      z = z_prev - p1 / dp;
      if (std::abs(z - z_prev) <= 1e-16)
        break;
    }
    // recompute the derivative at the converged node
    double p1 = 1.0;
    double p2 = 0.0;
    for (int j = 0; j < n; ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
    }
    dp = n * (z * p1 - p2) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = mid - half * z;
    rule.nodes[n - 1 - i] = mid + half * z;
    rule.weights[i] = half * w;
    rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

int default_quadrature_nodes(int n_modes)
{
  return std::max(2 * n_modes, 128);
}

} // namespace lfvp
