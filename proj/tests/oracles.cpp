#include "oracles.hpp"

#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_legendre.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace oracle {

Rule gauss(int n, double a, double b)
{
  gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(n);
  Rule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  std::vector<double> p(n + 1), dp(n + 1);
  for (int i = 0; i < n; ++i) {
    gsl_integration_glfixed_point(a, b, i, &rule.x[i], &rule.w[i], table);
    // The tabulated weights drift to ~1e-8 relative error for n in the hundreds;
    // recompute them from the node with w = 2 / ((1 - t^2) P_n'(t)^2).
    const double t = (2.0 * rule.x[i] - (a + b)) / (b - a);
    gsl_sf_legendre_Pl_deriv_array(n, t, p.data(), dp.data());
    rule.w[i] = (b - a) / ((1.0 - t * t) * dp[n] * dp[n]);
  }
  gsl_integration_glfixed_table_free(table);
  return rule;
}

double integrate(const std::function<double(double)>& f, double a, double b, int n)
{
  const auto rule = gauss(n, a, b);
  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    acc += rule.w[i] * f(rule.x[i]);
  return acc;
}

double phi(int n, double v, double v_a, double v_b)
{
  const double eta = std::clamp((2.0 * v - (v_a + v_b)) / (v_b - v_a), -1.0, 1.0);
  return std::sqrt(2.0 * n + 1.0) * gsl_sf_legendre_Pl(n, eta);
}

double evaluate(const lfvp::CoefficientMatrix& c, double length, double v_a, double v_b, double x, double v)
{
  std::complex<double> acc = 0.0;
  for (int n = 0; n < c.n_legendre(); ++n) {
    const double p = phi(n, v, v_a, v_b);
    for (int k = -c.n_fourier(); k <= c.n_fourier(); ++k)
      acc += c(n, k) * std::polar(1.0, 2.0 * std::numbers::pi * k * x / length) * p;
  }
  return acc.real();
}

lfvp::CoefficientMatrix random_state(int n_legendre, int n_fourier, std::mt19937& rng, double scale, bool damped)
{
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  lfvp::CoefficientMatrix c(n_legendre, n_fourier);
  for (int n = 0; n < n_legendre; ++n) {
    const double s = damped ? scale / (1.0 + n) : scale;
    c(n, 0) = s * u(rng);
    for (int k = 1; k <= n_fourier; ++k) {
      c(n, k) = s * std::complex<double>(u(rng), u(rng));
      c(n, -k) = std::conj(c(n, k));
    }
  }
  return c;
}

lfvp::FieldModes random_field(int n_fourier, std::mt19937& rng, double scale)
{
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  lfvp::FieldModes e(n_fourier);
  for (int k = 1; k <= n_fourier; ++k) {
    e[k] = scale * std::complex<double>(u(rng), u(rng));
    e[-k] = std::conj(e[k]);
  }
  return e;
}

} // namespace oracle
