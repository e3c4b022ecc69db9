#pragma once

// Independent reference computations for the tests: GSL Gauss-Legendre rules
// and GSL Legendre polynomials, plus seeded random spectral data.

#include "lfvp/spectral.hpp"

#include <functional>
#include <random>
#include <vector>

namespace oracle {

struct Rule
{
  std::vector<double> x;
  std::vector<double> w;
};

/// n-point Gauss-Legendre rule on [a, b] from gsl_integration_glfixed_table.
Rule gauss(int n, double a, double b);

/// Integral of f over [a, b] with an n-point GSL rule.
double integrate(const std::function<double(double)>& f, double a, double b, int n);

/// sqrt(2n+1) P_n(eta) via gsl_sf_legendre_Pl.
double phi(int n, double v, double v_a, double v_b);

/// f(x, v) summed term by term from the coefficients.
double evaluate(const lfvp::CoefficientMatrix& c, double length, double v_a, double v_b, double x, double v);

/// Hermitian-symmetric coefficients with entries of size ~scale, optionally
/// damped like 1/(1+n) to resemble a smooth distribution.
lfvp::CoefficientMatrix random_state(int n_legendre, int n_fourier, std::mt19937& rng, double scale = 1.0,
                                     bool damped = false);

/// Hermitian-symmetric field modes with E_0 = 0.
lfvp::FieldModes random_field(int n_fourier, std::mt19937& rng, double scale = 1.0);

} // namespace oracle
