#include "lfvp/errors.hpp"
#include "lfvp/legendre.hpp"
#include "oracles.hpp"

#include <boost/math/special_functions/legendre.hpp>
#include <doctest.h>

#include <cmath>
#include <random>

using namespace lfvp;

namespace {

double close_rel(double a, double b, double scale)
{
  return std::abs(a - b) / std::max(std::abs(b), scale);
}

} // namespace

TEST_CASE("upward recursion matches Boost Legendre polynomials")
{
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double eta = u(rng);
    for (int n = 0; n < 120; ++n)
      CHECK(eval_legendre(n, eta) == doctest::Approx(boost::math::legendre_p(n, eta)).epsilon(1e-12).scale(1.0));
  }
  CHECK(eval_legendre(7, 1.0) == 1.0);
  CHECK(eval_legendre(7, -1.0) == -1.0);
}

TEST_CASE("build_basis on [-5, 5] with 201 modes")
{
  const auto b = build_basis(-5.0, 5.0, 201);
  CHECK(b.sigma_bar == 0.0);
  CHECK(b.sigma[0] == 0.0);
  CHECK(b.sigma[1] == doctest::Approx(2.886751345948129).epsilon(1e-15));
  CHECK(b.sigma[2] == doctest::Approx(2.581988897471611).epsilon(1e-15));
  CHECK(b.deriv(1, 0) * b.sigma[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(b.deriv(2, 1) * b.sigma[2] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(b.width() == 10.0);
  for (int n = 0; n < 201; ++n) {
    const double root = std::sqrt(2.0 * n + 1.0);
    CHECK(b.phi_at_vb[n] == doctest::Approx(root).epsilon(1e-14));
    CHECK(b.phi_at_va[n] == doctest::Approx(n % 2 ? -root : root).epsilon(1e-14));
    CHECK(b.phi_at_vb[n] == eval_phi(b, n, 5.0));
  }
}

TEST_CASE("build_basis rejects bad input")
{
  CHECK_THROWS_AS(build_basis(1.0, 1.0, 10), ConfigError);
  CHECK_THROWS_AS(build_basis(2.0, -1.0, 10), ConfigError);
  CHECK_THROWS_AS(build_basis(-1.0, 1.0, 3), ConfigError);
}

TEST_CASE("own Gauss-Legendre rule agrees with GSL")
{
  for (int n : {4, 33, 128, 402}) {
    const auto mine = gauss_legendre(n, -2.0, 3.0);
    const auto ref = oracle::gauss(n, -2.0, 3.0);
    // The oracle weight inherits the node round-off amplified by P_n''/P_n', about
    // n^2 eps near the ends of the interval.
    const double wtol = std::max(1e-13, 1e-16 * n * n);
    for (int i = 0; i < n; ++i) {
      CHECK(mine.nodes[i] == doctest::Approx(ref.x[i]).epsilon(1e-14).scale(1.0));
      CHECK(mine.weights[i] == doctest::Approx(ref.w[i]).epsilon(wtol));
    }
  }
  double total = 0.0;
  for (double w : gauss_legendre(402, -2.0, 3.0).weights)
    total += w;
  CHECK(total == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(default_quadrature_nodes(10) == 128);
  CHECK(default_quadrature_nodes(201) == 402);
}

TEST_CASE("v phi_n and v^2 phi_n recursions against quadrature")
{
  for (auto [va, vb] : {std::pair{-5.0, 5.0}, std::pair{-2.0, 3.5}}) {
    const auto b = build_basis(va, vb, 54);
    const auto rule = oracle::gauss(128, va, vb);
    const double vmax = std::max(std::abs(va), std::abs(vb));
    const double scale1 = b.width() * vmax;
    const double scale2 = b.width() * vmax * vmax;
    for (int n = 0; n < 50; ++n) {
      const auto r1 = recursion_vphi(b, n);
      const auto r2 = recursion_v2phi(b, n);
      for (int m = 0; m < 50; ++m) {
        double q1 = 0.0;
        double q2 = 0.0;
        for (std::size_t i = 0; i < rule.x.size(); ++i) {
          const double v = rule.x[i];
          const double p = oracle::phi(n, v, va, vb) * oracle::phi(m, v, va, vb) * rule.w[i];
          q1 += v * p;
          q2 += v * v * p;
        }
        double e1 = 0.0;
        if (m == n + 1)
          e1 = r1.c_plus;
        if (m == n - 1)
          e1 = r1.c_minus;
        if (m == n)
          e1 = r1.c_zero;
        double e2 = 0.0;
        if (m == n + 2)
          e2 = r2.c_plus2;
        if (m == n + 1)
          e2 = r2.c_plus1;
        if (m == n)
          e2 = r2.c_zero;
        if (m == n - 1)
          e2 = r2.c_minus1;
        if (m == n - 2)
          e2 = r2.c_minus2;
        CHECK(close_rel(q1, b.width() * e1, scale1) < 1e-12);
        CHECK(close_rel(q2, b.width() * e2, scale2) < 1e-12);
      }
    }
  }
  const auto sym = build_basis(-5.0, 5.0, 10);
  CHECK(recursion_vphi(sym, 0).c_minus == 0.0);
  CHECK(recursion_vphi(sym, 0).c_zero == 0.0);
  CHECK(recursion_vphi(sym, 1).c_plus == doctest::Approx(2.581988897471611).epsilon(1e-15));
}

TEST_CASE("moment integrals against quadrature")
{
  const auto b = build_basis(-1.5, 4.0, 60);
  for (int n = 0; n < 50; ++n) {
    const auto m = moment_integrals(b, n);
    const double i0 = oracle::integrate([&](double v) { return oracle::phi(n, v, b.v_a, b.v_b); }, b.v_a, b.v_b, 128);
    const double i1 =
        oracle::integrate([&](double v) { return v * oracle::phi(n, v, b.v_a, b.v_b); }, b.v_a, b.v_b, 128);
    const double i2 =
        oracle::integrate([&](double v) { return v * v * oracle::phi(n, v, b.v_a, b.v_b); }, b.v_a, b.v_b, 128);
    CHECK(close_rel(m.i0, i0, b.width()) < 1e-12);
    CHECK(close_rel(m.i1, i1, b.width() * 4.0) < 1e-12);
    CHECK(close_rel(m.i2, i2, b.width() * 16.0) < 1e-12);
  }
  const auto sym = build_basis(-5.0, 5.0, 10);
  const auto m3 = moment_integrals(sym, 3);
  CHECK(m3.i0 == 0.0);
  CHECK(m3.i1 == 0.0);
  CHECK(m3.i2 == 0.0);
  CHECK(moment_integrals(sym, 0).i0 == 10.0);
}

TEST_CASE("derivative identity by centered differences")
{
  const auto b = build_basis(-5.0, 5.0, 50);
  std::mt19937 rng(11);
  const double h = 1e-6 * b.width();
  std::uniform_real_distribution<double> u(b.v_a + h, b.v_b - h);
  for (int trial = 0; trial < 200; ++trial) {
    const double v = u(rng);
    const auto phi = eval_phi_all(b, v);
    for (int n = 0; n < 50; ++n) {
      const double fd = (eval_phi(b, n, v + h) - eval_phi(b, n, v - h)) / (2.0 * h);
      double sum = 0.0;
      for (int i = 0; i < n; ++i)
        sum += b.deriv(n, i) * phi[i];
      // Round-off of the difference quotient scales like eps |phi| / h.
      const double floor = 1e-16 * std::sqrt(2.0 * n + 1.0) / h * 50.0;
      CHECK(std::abs(fd - sum) <= 1e-5 * std::abs(sum) + floor);
    }
  }
}

TEST_CASE("sigma_n sigma_{n,i} product")
{
  const auto b = build_basis(-3.0, 7.0, 60);
  for (int n = 1; n < 60; ++n)
    for (int i = 0; i < n; ++i) {
      const double expected = (n - i) % 2 ? n * std::sqrt(2.0 * i + 1.0) / std::sqrt(2.0 * n - 1.0) : 0.0;
      CHECK(b.sigma[n] * b.deriv(n, i) == doctest::Approx(expected).epsilon(1e-13));
    }
}
