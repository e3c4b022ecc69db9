#include "lfvp/operators.hpp"

#include "lfvp/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace lfvp {

namespace {

constexpr cplx I{0.0, 1.0};

double wavenumber(const DomainConfig& domain, int k)
{
  return 2.0 * std::numbers::pi * k / domain.length;
}

// out.row(n) = (B c).row(n) - penalty[n] * delta_v[f phi_n], all k at once.
CoefficientMatrix accelerated_moments(const VelocityBasis& basis, const CoefficientMatrix& c,
                                      std::span<const double> penalty)
{
  const int nl = c.n_legendre();
  const int nk = c.n_k();
  CoefficientMatrix w(nl, c.n_fourier());
  std::vector<cplx> sums[2] = {std::vector<cplx>(nk), std::vector<cplx>(nk)};
  const double scale = 2.0 / basis.width();
  for (int n = 0; n < nl; ++n) {
    const double root = std::sqrt(2.0 * n + 1.0);
    auto out = w.row(n);
    const auto& s = sums[(n + 1) % 2];
    for (int k = 0; k < nk; ++k)
      out[k] = scale * root * s[k];
    auto& acc = sums[n % 2];
    const auto in = c.row(n);
    for (int k = 0; k < nk; ++k)
      acc[k] += root * in[k];
  }

  bool penalized = false;
  for (double g : penalty)
    penalized = penalized || g != 0.0;
  if (penalized) {
    const auto bv = boundary_values(c, basis);
    const auto fa = bv.at_va.values();
    const auto fb = bv.at_vb.values();
    const double inv_w = 1.0 / basis.width();
    for (int n = 0; n < nl; ++n) {
      if (penalty[n] == 0.0)
        continue;
      const double pa = penalty[n] * basis.phi_at_va[n] * inv_w;
      const double pb = penalty[n] * basis.phi_at_vb[n] * inv_w;
      auto out = w.row(n);
      for (int k = 0; k < nk; ++k)
        out[k] -= fb[k] * pb - fa[k] * pa;
    }
  }
  return w;
}

bool is_zero(const FieldModes& field)
{
  for (const auto& e : field.values())
    if (e != cplx{})
      return false;
  return true;
}

} // namespace

Plasma Plasma::build(const DomainConfig& domain, std::vector<Species> species, double background_charge)
{
  domain.validate();
  if (species.empty())
    throw ConfigError("plasma: at least one kinetic species is required");
  Plasma plasma;
  plasma.domain = domain;
  plasma.background_charge = background_charge;
  for (auto& sp : species) {
    sp.validate();
    const double va = sp.v_a.value_or(domain.v_a);
    const double vb = sp.v_b.value_or(domain.v_b);
    plasma.bases.push_back(build_basis(va, vb, domain.n_legendre));
    plasma.collisions.push_back(collision_diagonal(sp.nu, domain.n_legendre));
  }
  plasma.species = std::move(species);
  return plasma;
}

SpectralState Plasma::zero_state() const
{
  return SpectralState(species.size(), CoefficientMatrix(domain.n_legendre, domain.n_fourier));
}

std::vector<double> collision_diagonal(double nu, int n_modes)
{
  if (n_modes < 4)
    throw ConfigError("collision operator: need at least 4 Legendre modes");
  std::vector<double> d(n_modes, 0.0);
  const double denom = (n_modes - 1.0) * (n_modes - 2.0) * (n_modes - 3.0);
  for (int n = 3; n < n_modes; ++n)
    d[n] = -nu * (n * (n - 1.0) * (n - 2.0)) / denom;
  return d;
}

std::vector<double> penalty_diagonal(const Species& species, int n_modes, double adaptive_value)
{
  std::vector<double> g(n_modes, 0.0);
  switch (species.penalty_mode) {
  case PenaltyMode::none:
    break;
  case PenaltyMode::all_modes:
    std::fill(g.begin(), g.end(), species.gamma);
    break;
  case PenaltyMode::skip_first_three:
    for (int n = 3; n < n_modes; ++n)
      g[n] = species.gamma;
    break;
  case PenaltyMode::adaptive:
    for (int n = 3; n < n_modes; ++n)
      g[n] = adaptive_value;
    break;
  }
  return g;
}

std::vector<cplx> apply_A(const VelocityBasis& basis, std::span<const cplx> column)
{
  const int nl = static_cast<int>(column.size());
  std::vector<cplx> out(nl);
  for (int n = 0; n < nl; ++n) {
    cplx v = basis.sigma_bar * column[n];
    if (n + 1 < nl)
      v += basis.sigma[n + 1] * column[n + 1];
    if (n >= 1)
      v += basis.sigma[n] * column[n - 1];
    out[n] = v;
  }
  return out;
}

std::vector<cplx> apply_B(const VelocityBasis& basis, std::span<const cplx> column)
{
  const int nl = static_cast<int>(column.size());
  std::vector<cplx> out(nl);
  cplx sums[2] = {0.0, 0.0};
  const double scale = 2.0 / basis.width();
  for (int n = 0; n < nl; ++n) {
    const double root = std::sqrt(2.0 * n + 1.0);
    out[n] = scale * root * sums[(n + 1) % 2];
    sums[n % 2] += root * column[n];
  }
  return out;
}

CoefficientMatrix apply_A(const VelocityBasis& basis, const CoefficientMatrix& c)
{
  CoefficientMatrix out(c.n_legendre(), c.n_fourier());
  for (int k = -c.n_fourier(); k <= c.n_fourier(); ++k)
    out.set_column(k, apply_A(basis, c.column(k)));
  return out;
}

CoefficientMatrix apply_B(const VelocityBasis& basis, const CoefficientMatrix& c)
{
  const std::vector<double> no_penalty(c.n_legendre(), 0.0);
  return accelerated_moments(basis, c, no_penalty);
}

CoefficientMatrix boundary_term(const VelocityBasis& basis, const CoefficientMatrix& c)
{
  const auto bv = boundary_values(c, basis);
  CoefficientMatrix out(c.n_legendre(), c.n_fourier());
  const double inv_w = 1.0 / basis.width();
  for (int n = 0; n < c.n_legendre(); ++n)
    for (int k = -c.n_fourier(); k <= c.n_fourier(); ++k)
      out(n, k) = (bv.at_vb[k] * basis.phi_at_vb[n] - bv.at_va[k] * basis.phi_at_va[n]) * inv_w;
  return out;
}

double net_charge(const Plasma& plasma, const SpectralState& states)
{
  double rho = plasma.background_charge;
  for (int s = 0; s < plasma.n_species(); ++s)
    rho += plasma.species[s].charge * plasma.bases[s].width() * states[s](0, 0).real();
  return rho;
}

FieldModes poisson_solve(const Plasma& plasma, const SpectralState& states, NeutralityCheck check)
{
  const int nf = plasma.domain.n_fourier;
  if (check == NeutralityCheck::enforce) {
    const double rho0 = net_charge(plasma, states);
    if (!(std::abs(rho0) < 1e-12)) {
      std::ostringstream msg;
      msg << "poisson: plasma is not neutral, total k=0 charge density " << rho0;
      throw ConfigError(msg.str());
    }
  }
  FieldModes e(nf);
  for (int k = -nf; k <= nf; ++k) {
    if (k == 0)
      continue;
    cplx rho = 0.0;
    for (int s = 0; s < plasma.n_species(); ++s)
      rho += plasma.species[s].charge * plasma.bases[s].width() * states[s](0, k);
    e[k] = rho / (plasma.domain.epsilon0 * I * wavenumber(plasma.domain, k));
  }
  return e;
}

ModeVector current_density(const Plasma& plasma, int s, const CoefficientMatrix& c)
{
  const auto& basis = plasma.bases[s];
  const double scale = plasma.species[s].charge * basis.width() * plasma.domain.length;
  ModeVector j(c.n_fourier());
  for (int k = -c.n_fourier(); k <= c.n_fourier(); ++k)
    j[k] = scale * (basis.sigma[1] * c(1, k) + basis.sigma_bar * c(0, k));
  return j;
}

ModeVector ampere_boundary_Q(const Plasma& plasma, int s, const CoefficientMatrix& c, const FieldModes& field)
{
  const auto& basis = plasma.bases[s];
  const auto& sp = plasma.species[s];
  const int nf = c.n_fourier();
  const auto bv = boundary_values(c, basis);
  ModeVector delta0(nf);
  for (int k = -nf; k <= nf; ++k)
    delta0[k] = (bv.at_vb[k] - bv.at_va[k]) / basis.width();
  const auto conv = convolve(field, delta0);
  const double scale = basis.width() * plasma.domain.length * sp.charge * sp.charge / sp.mass;
  ModeVector q(nf);
  for (int k = -nf; k <= nf; ++k)
    if (k != 0)
      q[k] = scale * conv[k] / (I * wavenumber(plasma.domain, k));
  return q;
}

PenaltySet default_penalties(const Plasma& plasma)
{
  PenaltySet out;
  for (const auto& sp : plasma.species)
    out.push_back(penalty_diagonal(sp, plasma.domain.n_legendre));
  return out;
}

CoefficientMatrix species_rhs(const Plasma& plasma, int s, const CoefficientMatrix& c, const FieldModes& field,
                              std::span<const double> penalty, bool with_collisions)
{
  const auto& basis = plasma.bases[s];
  const auto& sp = plasma.species[s];
  const int nl = c.n_legendre();
  const int nf = c.n_fourier();
  CoefficientMatrix out(nl, nf);

  // streaming: -(2 pi i k / L) (A C_k)_n
  for (int n = 0; n < nl; ++n) {
    auto o = out.row(n);
    const auto cn = c.row(n);
    const double sb = basis.sigma_bar;
    const double sup = n + 1 < nl ? basis.sigma[n + 1] : 0.0;
    const double sdn = basis.sigma[n];
    const cplx* up = n + 1 < nl ? c.row(n + 1).data() : nullptr;
    const cplx* dn = n >= 1 ? c.row(n - 1).data() : nullptr;
    for (int kk = 0; kk < 2 * nf + 1; ++kk) {
      cplx a = sb * cn[kk];
      if (up)
        a += sup * up[kk];
      if (dn)
        a += sdn * dn[kk];
      o[kk] = -I * wavenumber(plasma.domain, kk - nf) * a;
    }
  }

  if (!is_zero(field)) {
    const auto w = accelerated_moments(basis, c, penalty);
    const cplx qm = sp.charge / sp.mass;
    for (int n = 0; n < nl; ++n)
      convolve_accumulate(field.values(), w.row(n), qm, out.row(n));
  }

  if (with_collisions) {
    const auto& d = plasma.collisions[s];
    for (int n = 3; n < nl; ++n) {
      if (d[n] == 0.0)
        continue;
      auto o = out.row(n);
      const auto cn = c.row(n);
      for (int kk = 0; kk < 2 * nf + 1; ++kk)
        o[kk] += d[n] * cn[kk];
    }
  }
  return out;
}

SpectralState semi_discrete_rhs(const Plasma& plasma, const SpectralState& states, const FieldModes& field,
                                const PenaltySet& penalties)
{
  SpectralState out;
  out.reserve(states.size());
  for (int s = 0; s < plasma.n_species(); ++s)
    out.push_back(species_rhs(plasma, s, states[s], field, penalties[s]));
  return out;
}

BoundaryIdentityTerms boundary_identity_terms(const VelocityBasis& basis, const CoefficientMatrix& c, const FieldModes& field)
{
  const int nl = c.n_legendre();
  const int nf = c.n_fourier();
  const int nk = c.n_k();
  BoundaryIdentityTerms out{0.0, 0.0, 0.0, std::vector<cplx>(nl)};

  const auto bc = apply_B(basis, c);
  const auto delta = boundary_term(basis, c);
  std::vector<cplx> conv(nk);
  for (int n = 0; n < nl; ++n) {
    const auto cn = c.row(n);

    std::fill(conv.begin(), conv.end(), cplx{});
    convolve_accumulate(field.values(), bc.row(n), 1.0, conv);
    cplx acc = 0.0;
    for (int k = 0; k < nk; ++k)
      acc += std::conj(cn[k]) * conv[k];
    out.b_term += 2.0 * acc;

    std::fill(conv.begin(), conv.end(), cplx{});
    convolve_accumulate(field.values(), delta.row(n), 1.0, conv);
    acc = 0.0;
    for (int k = 0; k < nk; ++k)
      acc += std::conj(cn[k]) * conv[k];
    out.boundary_rows[n] = acc;
    out.boundary_proj += acc;
  }

  const auto bv = boundary_values(c, basis);
  const auto fb2 = convolve(bv.at_vb, bv.at_vb);
  const auto fa2 = convolve(bv.at_va, bv.at_va);
  for (int k = -nf; k <= nf; ++k)
    out.boundary_square += field[k] * (fb2[-k] - fa2[-k]) / basis.width();
  return out;
}

AdaptiveGamma adaptive_gamma(const VelocityBasis& basis, const CoefficientMatrix& c, const FieldModes& field,
                             int first_mode)
{
  const auto terms = boundary_identity_terms(basis, c, field);
  const cplx numerator = 0.5 * terms.b_term;
  cplx denominator = 0.0;
  for (int n = first_mode; n < c.n_legendre(); ++n)
    denominator += terms.boundary_rows[n];

  AdaptiveGamma out;
  if (std::abs(denominator) < 1e-14) {
    out.fallback = true;
    out.gamma = 0.5;
    return out;
  }
  const double scale = std::max(std::abs(numerator), std::abs(denominator));
  out.imag_residue = std::max(std::abs(numerator.imag()), std::abs(denominator.imag())) / scale;
  out.gamma = numerator.real() / denominator.real();
  return out;
}

} // namespace lfvp
