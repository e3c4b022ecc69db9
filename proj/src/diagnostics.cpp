#include "lfvp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace lfvp {

namespace {

constexpr cplx I{0.0, 1.0};

double scale(const Plasma& plasma, int s)
{
  return plasma.species[s].mass * plasma.bases[s].width() * plasma.domain.length;
}

CoefficientMatrix add(const CoefficientMatrix& a, const CoefficientMatrix& b)
{
  CoefficientMatrix out = a;
  auto o = out.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < o.size(); ++i)
    o[i] += bd[i];
  return out;
}

ModeVector add(const ModeVector& a, const ModeVector& b)
{
  ModeVector out = a;
  for (int k = -a.n_fourier(); k <= a.n_fourier(); ++k)
    out[k] += b[k];
  return out;
}

// [g * h]_0 = sum_k g_k h_{-k}
cplx zero_mode_product(const ModeVector& g, std::span<const cplx> h)
{
  const int nf = g.n_fourier();
  cplx acc = 0.0;
  for (int k = -nf; k <= nf; ++k)
    acc += g[k] * h[nf - k];
  return acc;
}

} // namespace

double mass(const Plasma& plasma, int s, const CoefficientMatrix& c)
{
  return scale(plasma, s) * c(0, 0).real();
}

double species_momentum(const Plasma& plasma, int s, const CoefficientMatrix& c)
{
  const auto& b = plasma.bases[s];
  return scale(plasma, s) * (b.sigma[1] * c(1, 0).real() + b.sigma_bar * c(0, 0).real());
}

Momentum momentum(const Plasma& plasma, const SpectralState& states)
{
  Momentum out;
  for (int s = 0; s < plasma.n_species(); ++s) {
    out.per_species.push_back(species_momentum(plasma, s, states[s]));
    out.total += out.per_species.back();
  }
  return out;
}

double kinetic_energy(const Plasma& plasma, int s, const CoefficientMatrix& c)
{
  const auto& b = plasma.bases[s];
  const double s1 = b.sigma[1];
  const double s2 = b.sigma[2];
  const double sb = b.sigma_bar;
  return 0.5 * scale(plasma, s) *
         (s2 * s1 * c(2, 0).real() + 2.0 * s1 * sb * c(1, 0).real() + (s1 * s1 + sb * sb) * c(0, 0).real());
}

double potential_energy(const Plasma& plasma, const FieldModes& field)
{
  cplx acc = 0.0;
  for (int k = -field.n_fourier(); k <= field.n_fourier(); ++k)
    acc += field[k] * field[-k];
  return 0.5 * plasma.domain.epsilon0 * plasma.domain.length * acc.real();
}

Energy energy(const Plasma& plasma, const SpectralState& states, const FieldModes& field)
{
  Energy out;
  out.potential = potential_energy(plasma, field);
  out.total = out.potential;
  for (int s = 0; s < plasma.n_species(); ++s) {
    out.kinetic.push_back(kinetic_energy(plasma, s, states[s]));
    out.total += out.kinetic.back();
  }
  return out;
}

double l2_norm_sq(const CoefficientMatrix& c)
{
  double acc = 0.0;
  for (const auto& z : c.data())
    acc += std::norm(z);
  return acc;
}

double relative_l2(const CoefficientMatrix& c, const CoefficientMatrix& c0)
{
  const double ref = l2_norm_sq(c0);
  if (ref == 0.0)
    throw std::domain_error("relative_l2: initial state has zero norm");
  return l2_norm_sq(c) / ref;
}

double boundary_max(const DomainConfig& domain, const VelocityBasis& basis, const CoefficientMatrix& c, int n_x)
{
  const auto bv = boundary_values(c, basis);
  const int nf = c.n_fourier();
  double best = 0.0;
  for (int j = 0; j < n_x; ++j) {
    const double x = j * domain.length / n_x;
    cplx fa = 0.0;
    cplx fb = 0.0;
    for (int k = -nf; k <= nf; ++k) {
      const cplx e = std::polar(1.0, 2.0 * std::numbers::pi * k * x / domain.length);
      fa += bv.at_va[k] * e;
      fb += bv.at_vb[k] * e;
    }
    best = std::max({best, std::abs(fa), std::abs(fb)});
  }
  return best;
}

StepBoundaryTerms step_boundary_terms(const Plasma& plasma, const SpectralState& old_states,
                                      const SpectralState& new_states, const FieldModes& old_field,
                                      const FieldModes& new_field, const PenaltySet& penalties)
{
  const int nf = plasma.domain.n_fourier;
  const auto esum = add(old_field, new_field);
  StepBoundaryTerms out;
  out.b_amp = ModeVector(nf);
  for (int s = 0; s < plasma.n_species(); ++s) {
    const auto& basis = plasma.bases[s];
    const auto& sp = plasma.species[s];
    const auto& g = penalties[s];
    const auto delta = boundary_term(basis, add(old_states[s], new_states[s]));
    const double base = basis.width() * plasma.domain.length / 4.0;

    std::array<double, 3> b{};
    for (int n = 0; n < 3; ++n)
      b[n] = -g[n] * sp.charge * base * zero_mode_product(esum, delta.row(n)).real();
    out.b_n0.push_back(b);

    const double s1 = basis.sigma[1];
    const double s2 = basis.sigma[2];
    const double sb = basis.sigma_bar;
    out.b_kin.push_back(0.5 * (s2 * s1 * b[2] + 2.0 * s1 * sb * b[1] + (s1 * s1 + sb * sb) * b[0]));

    if (g[0] != 0.0) {
      std::vector<cplx> conv(2 * nf + 1);
      convolve_accumulate(esum.values(), delta.row(0), 1.0, conv);
      const double amp = -g[0] * base * sp.charge * sp.charge / sp.mass;
      for (int k = -nf; k <= nf; ++k)
        if (k != 0)
          out.b_amp[k] += amp * conv[k + nf] / (I * (2.0 * std::numbers::pi * k / plasma.domain.length));
    }
  }
  cplx pot = 0.0;
  for (int k = -nf; k <= nf; ++k)
    pot += esum[-k] * out.b_amp[k];
  out.b_pot = 0.5 * pot.real();
  return out;
}

Balances discrete_balances(const Plasma& plasma, const SpectralState& old_states, const SpectralState& new_states,
                           const FieldModes& old_field, const FieldModes& new_field, double dt,
                           const PenaltySet& penalties)
{
  const auto terms = step_boundary_terms(plasma, old_states, new_states, old_field, new_field, penalties);
  Balances out;

  double dp = 0.0;
  double de = potential_energy(plasma, new_field) - potential_energy(plasma, old_field);
  double boundary_energy = terms.b_pot;
  for (int s = 0; s < plasma.n_species(); ++s) {
    const auto& basis = plasma.bases[s];
    const auto& b = terms.b_n0[s];
    const double dm = mass(plasma, s, new_states[s]) - mass(plasma, s, old_states[s]) - dt * b[0];
    if (std::abs(dm) > std::abs(out.mass))
      out.mass = dm;
    dp += species_momentum(plasma, s, new_states[s]) - species_momentum(plasma, s, old_states[s]) -
          dt * (basis.sigma[1] * b[1] + basis.sigma_bar * b[0]);
    de += kinetic_energy(plasma, s, new_states[s]) - kinetic_energy(plasma, s, old_states[s]);
    boundary_energy += terms.b_kin[s];
  }
  out.momentum = dp;
  out.energy = de - dt * boundary_energy;

  const int nf = plasma.domain.n_fourier;
  ModeVector jsum(nf);
  for (int s = 0; s < plasma.n_species(); ++s) {
    const auto jo = current_density(plasma, s, old_states[s]);
    const auto jn = current_density(plasma, s, new_states[s]);
    for (int k = -nf; k <= nf; ++k)
      jsum[k] += jo[k] + jn[k];
    out.current_k0 += jn[0].real();
  }
  const double eps_l = plasma.domain.epsilon0 * plasma.domain.length;
  for (int k = -nf; k <= nf; ++k) {
    if (k == 0)
      continue;
    const cplx r = eps_l * (new_field[k] - old_field[k]) + 0.5 * dt * jsum[k] - dt * terms.b_amp[k];
    out.ampere = std::max(out.ampere, std::abs(r));
  }
  return out;
}

StabilityCheck stability_identity_check(const Plasma& plasma, int s, const CoefficientMatrix& c,
                                        const FieldModes& field, std::span<const double> penalty)
{
  const auto& sp = plasma.species[s];
  const auto rhs = species_rhs(plasma, s, c, field, penalty);
  const auto cd = c.data();
  const auto rd = rhs.data();
  cplx acc = 0.0;
  for (std::size_t i = 0; i < cd.size(); ++i)
    acc += std::conj(cd[i]) * rd[i];

  const auto terms = boundary_identity_terms(plasma.bases[s], c, field);
  const double x = terms.boundary_square.real();
  double penalized = 0.0;
  for (int n = 0; n < c.n_legendre(); ++n)
    penalized += penalty[n] * terms.boundary_rows[n].real();

  double collisional = 0.0;
  const auto& d = plasma.collisions[s];
  for (int n = 0; n < c.n_legendre(); ++n) {
    double row = 0.0;
    for (const auto& z : c.row(n))
      row += std::norm(z);
    collisional -= 2.0 * std::abs(d[n]) * row;
  }

  const double qm = sp.charge / sp.mass;
  StabilityCheck out;
  out.lhs = 2.0 * acc.real();
  out.predicted = qm * (x - 2.0 * penalized) + collisional;
  out.discrepancy = out.lhs - out.predicted;
  out.unpenalized = -qm * x + collisional;
  out.collisional = collisional;
  return out;
}

DiagnosticsRecord make_record(const Plasma& plasma, double t, const SpectralState& states,
                              const SpectralState& initial, const std::vector<int>& field_modes, int n_x)
{
  DiagnosticsRecord rec;
  rec.t = t;
  const auto field = poisson_solve(plasma, states, NeutralityCheck::skip);
  double residue = 0.0;
  for (int s = 0; s < plasma.n_species(); ++s) {
    const auto& c = states[s];
    SpeciesDiagnostics d;
    d.mass = mass(plasma, s, c);
    d.momentum = species_momentum(plasma, s, c);
    d.kinetic_energy = kinetic_energy(plasma, s, c);
    const double ref = l2_norm_sq(initial[s]);
    d.l2_rel = ref > 0.0 ? l2_norm_sq(c) / ref : 0.0;
    d.boundary_max = boundary_max(plasma.domain, plasma.bases[s], c, n_x);
    residue = std::max({residue, std::abs(c(0, 0).imag()), std::abs(c(1, 0).imag()), std::abs(c(2, 0).imag())});
    rec.species.push_back(d);
    rec.total_momentum += d.momentum;
    rec.total_energy += d.kinetic_energy;
  }
  rec.potential_energy = potential_energy(plasma, field);
  rec.total_energy += rec.potential_energy;
  for (int k : field_modes)
    rec.field_abs.push_back(std::abs(k) <= field.n_fourier() ? std::abs(field[k]) : 0.0);
  rec.imag_residue = residue;
  return rec;
}

std::vector<std::string> csv_columns(const Plasma& plasma, const std::vector<int>& field_modes)
{
  std::vector<std::string> cols{"t"};
  for (const auto& sp : plasma.species)
    for (const char* q : {"M", "P", "E_kin", "l2_rel", "f_bc_max"})
      cols.push_back(std::string(q) + "_" + sp.name);
  cols.insert(cols.end(), {"E_pot", "E_tot", "P_total"});
  for (int k : field_modes)
    cols.push_back("E" + std::to_string(k) + "_abs");
  cols.insert(cols.end(), {"mass_balance", "momentum_balance", "energy_balance"});
  return cols;
}

void write_csv_header(std::ostream& out, const Plasma& plasma, const std::vector<int>& field_modes)
{
  const auto cols = csv_columns(plasma, field_modes);
  for (std::size_t i = 0; i < cols.size(); ++i)
    out << (i ? "," : "") << cols[i];
  out << '\n';
}

void write_csv_row(std::ostream& out, const DiagnosticsRecord& record)
{
  char buf[32];
  bool first = true;
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.16e", v);
    out << (first ? "" : ",") << buf;
    first = false;
  };
  put(record.t);
  for (const auto& d : record.species) {
    put(d.mass);
    put(d.momentum);
    put(d.kinetic_energy);
    put(d.l2_rel);
    put(d.boundary_max);
  }
  put(record.potential_energy);
  put(record.total_energy);
  put(record.total_momentum);
  for (double e : record.field_abs)
    put(e);
  put(record.balances.mass);
  put(record.balances.momentum);
  put(record.balances.energy);
  out << '\n';
}

} // namespace lfvp
