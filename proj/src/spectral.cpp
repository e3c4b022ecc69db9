#include "lfvp/spectral.hpp"

#include "lfvp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace lfvp {

void DomainConfig::validate() const
{
  if (!(length > 0.0))
    throw ConfigError("domain: length must be positive");
  if (!(v_a < v_b))
    throw ConfigError("domain: require v_a < v_b");
  if (n_fourier < 1)
    throw ConfigError("domain: n_fourier must be >= 1");
  if (n_legendre < 4)
    throw ConfigError("domain: n_legendre must be >= 4");
  if (!(epsilon0 > 0.0))
    throw ConfigError("domain: epsilon0 must be positive");
}

std::string to_string(PenaltyMode mode)
{
  switch (mode) {
  case PenaltyMode::none:
    return "none";
  case PenaltyMode::all_modes:
    return "all_modes";
  case PenaltyMode::skip_first_three:
    return "skip_first_three";
  case PenaltyMode::adaptive:
    return "adaptive";
  }
  return "none";
}

PenaltyMode penalty_mode_from_string(const std::string& name)
{
  static const std::map<std::string, PenaltyMode> table{
      {"none", PenaltyMode::none},
      {"all_modes", PenaltyMode::all_modes},
      {"skip_first_three", PenaltyMode::skip_first_three},
      {"adaptive", PenaltyMode::adaptive},
  };
  const auto it = table.find(name);
  if (it == table.end())
    throw ConfigError("unknown penalty mode '" + name +
                      "' (expected none, all_modes, skip_first_three or adaptive)");
  return it->second;
}

void Species::validate() const
{
  if (!(mass > 0.0))
    throw ConfigError("species '" + name + "': mass must be positive");
  if (!(nu >= 0.0))
    throw ConfigError("species '" + name + "': nu must be non-negative");
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw ConfigError("species '" + name + "': gamma must lie in [0, 1]");
  if (v_a.has_value() != v_b.has_value())
    throw ConfigError("species '" + name + "': give both v_a and v_b or neither");
  if (v_a && !(*v_a < *v_b))
    throw ConfigError("species '" + name + "': require v_a < v_b");
}

std::vector<cplx> CoefficientMatrix::column(int k) const
{
  std::vector<cplx> out(nl_);
  for (int n = 0; n < nl_; ++n)
    out[n] = (*this)(n, k);
  return out;
}

void CoefficientMatrix::set_column(int k, std::span<const cplx> values)
{
  for (int n = 0; n < nl_; ++n)
    (*this)(n, k) = values[n];
}

void convolve_accumulate(std::span<const cplx> g, std::span<const cplx> h, cplx scale, std::span<cplx> out)
{
  const int nf = static_cast<int>(g.size() / 2);
  for (int k = -nf; k <= nf; ++k) {
    const int lo = std::max(-nf, k - nf);
    const int hi = std::min(nf, k + nf);
    cplx acc = 0.0;
    for (int kp = lo; kp <= hi; ++kp)
      acc += g[kp + nf] * h[k - kp + nf];
    out[k + nf] += scale * acc;
  }
}

ModeVector convolve(const ModeVector& g, const ModeVector& h)
{
  ModeVector out(g.n_fourier());
  convolve_accumulate(g.values(), h.values(), 1.0, out.values());
  return out;
}

InitialProfile InitialProfile::maxwellian(double alpha, double drift, double epsilon, int wavenumber)
{
  InitialProfile p;
  p.kind = Kind::maxwellian;
  p.alpha = alpha;
  p.drift = drift;
  p.epsilon = epsilon;
  p.wavenumber = wavenumber;
  return p;
}

InitialProfile InitialProfile::two_stream(double alpha, double beam_speed, double epsilon, int wavenumber)
{
  InitialProfile p;
  p.kind = Kind::two_stream;
  p.alpha = alpha;
  p.drift = beam_speed;
  p.epsilon = epsilon;
  p.wavenumber = wavenumber;
  return p;
}

InitialProfile InitialProfile::separable(std::function<double(double)> g, double epsilon, int wavenumber)
{
  InitialProfile p;
  p.kind = Kind::custom;
  p.custom = std::move(g);
  p.epsilon = epsilon;
  p.wavenumber = wavenumber;
  return p;
}

double InitialProfile::velocity_profile(double v) const
{
  const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * alpha);
  switch (kind) {
  case Kind::maxwellian: {
    const double z = (v - drift) / alpha;
    return density * norm * std::exp(-0.5 * z * z);
  }
  case Kind::two_stream: {
    const double zp = (v - drift) / alpha;
    const double zm = (v + drift) / alpha;
    return density * 0.5 * norm * (std::exp(-0.5 * zp * zp) + std::exp(-0.5 * zm * zm));
  }
  case Kind::custom:
    return custom(v);
  }
  return 0.0;
}

std::string to_string(InitialProfile::Kind kind)
{
  switch (kind) {
  case InitialProfile::Kind::maxwellian:
    return "maxwellian";
  case InitialProfile::Kind::two_stream:
    return "two_stream";
  case InitialProfile::Kind::custom:
    return "custom";
  }
  return "custom";
}

CoefficientMatrix project_initial(const DomainConfig& domain, const VelocityBasis& basis,
                                  const InitialProfile& profile, double tail_tolerance)
{
  if (profile.kind == InitialProfile::Kind::custom && !profile.custom)
    throw ConfigError("initial profile: custom profile without a function");
  if (profile.epsilon != 0.0 && (profile.wavenumber < 1 || profile.wavenumber > domain.n_fourier))
    throw ConfigError("initial profile: perturbation wavenumber " + std::to_string(profile.wavenumber) +
                      " outside [1, n_fourier]");

  const auto rule = gauss_legendre(default_quadrature_nodes(basis.n_modes), basis.v_a, basis.v_b);
  CoefficientMatrix c(basis.n_modes, domain.n_fourier);

  double peak = 0.0;
  std::vector<double> moments(basis.n_modes, 0.0);
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double g = profile.velocity_profile(rule.nodes[q]);
    peak = std::max(peak, std::abs(g));
    const auto phi = eval_phi_all(basis, rule.nodes[q]);
    for (int n = 0; n < basis.n_modes; ++n)
      moments[n] += rule.weights[q] * g * phi[n];
  }

  const double tail = std::max(std::abs(profile.velocity_profile(basis.v_a)),
                               std::abs(profile.velocity_profile(basis.v_b)));
  if (tail > tail_tolerance * peak) {
    std::ostringstream msg;
    msg << "initial profile: value at the velocity boundary (" << tail << ") exceeds " << tail_tolerance
        << " of the peak; the distribution is not compactly supported in [" << basis.v_a << ", " << basis.v_b << "]";
    throw ConfigError(msg.str());
  }

  for (int n = 0; n < basis.n_modes; ++n) {
    const double c0 = moments[n] / basis.width();
    c(n, 0) = c0;
    if (profile.epsilon != 0.0) {
      // cos(2 pi k x / L) = (psi_k + psi_{-k}) / 2
      c(n, profile.wavenumber) = 0.5 * profile.epsilon * c0;
      c(n, -profile.wavenumber) = 0.5 * profile.epsilon * c0;
    }
  }
  return c;
}

PhaseSpaceGrid reconstruct_at(const DomainConfig& domain, const VelocityBasis& basis, const CoefficientMatrix& c,
                              std::span<const double> xs, std::span<const double> vs)
{
  const int nf = c.n_fourier();
  const int nl = c.n_legendre();
  PhaseSpaceGrid grid;
  grid.x.assign(xs.begin(), xs.end());
  grid.v.assign(vs.begin(), vs.end());
  grid.values.assign(xs.size() * vs.size(), 0.0);

  // C_n(x_j) for every n, then contract with phi_n(v_l).
  std::vector<cplx> cn_x(static_cast<std::size_t>(nl) * xs.size());
  for (std::size_t j = 0; j < xs.size(); ++j) {
    std::vector<cplx> psi(2 * nf + 1);
    for (int k = -nf; k <= nf; ++k)
      psi[k + nf] = std::polar(1.0, 2.0 * std::numbers::pi * k * xs[j] / domain.length);
    for (int n = 0; n < nl; ++n) {
      cplx acc = 0.0;
      const auto row = c.row(n);
      for (int k = 0; k < 2 * nf + 1; ++k)
        acc += row[k] * psi[k];
      cn_x[static_cast<std::size_t>(n) * xs.size() + j] = acc;
    }
  }

  double residue = 0.0;
  for (std::size_t l = 0; l < vs.size(); ++l) {
    const auto phi = eval_phi_all(basis, vs[l]);
    for (std::size_t j = 0; j < xs.size(); ++j) {
      cplx acc = 0.0;
      for (int n = 0; n < nl; ++n)
        acc += cn_x[static_cast<std::size_t>(n) * xs.size() + j] * phi[n];
      residue = std::max(residue, std::abs(acc.imag()));
      grid.values[j * vs.size() + l] = acc.real();
    }
  }
  grid.max_imag_residue = residue;
  if (residue > 1e-10)
    throw SolverError("reconstruct_f: imaginary residue " + std::to_string(residue) +
                      " exceeds 1e-10; coefficients are not Hermitian-symmetric");
  return grid;
}

PhaseSpaceGrid reconstruct_f(const DomainConfig& domain, const VelocityBasis& basis, const CoefficientMatrix& c,
                             int n_x, int n_v)
{
  if (n_x < 2 * c.n_fourier() + 1)
    throw ConfigError("reconstruct_f: n_x must be at least 2 N_F + 1");
  if (n_v < 2)
    throw ConfigError("reconstruct_f: n_v must be at least 2");
  std::vector<double> xs(n_x);
  std::vector<double> vs(n_v);
  for (int j = 0; j < n_x; ++j)
    xs[j] = domain.length * j / n_x;
  for (int l = 0; l < n_v; ++l)
    vs[l] = basis.v_a + (basis.v_b - basis.v_a) * l / (n_v - 1);
  vs.back() = basis.v_b;
  return reconstruct_at(domain, basis, c, xs, vs);
}

BoundaryValues boundary_values(const CoefficientMatrix& c, const VelocityBasis& basis)
{
  const int nf = c.n_fourier();
  BoundaryValues out{ModeVector(nf), ModeVector(nf)};
  auto fa = out.at_va.values();
  auto fb = out.at_vb.values();
  for (int n = 0; n < c.n_legendre(); ++n) {
    const auto row = c.row(n);
    const double pa = basis.phi_at_va[n];
    const double pb = basis.phi_at_vb[n];
    for (std::size_t k = 0; k < row.size(); ++k) {
      fa[k] += row[k] * pa;
      fb[k] += row[k] * pb;
    }
  }
  return out;
}

void symmetrize(CoefficientMatrix& c)
{
  const int nf = c.n_fourier();
  for (int n = 0; n < c.n_legendre(); ++n) {
    c(n, 0) = c(n, 0).real();
    for (int k = 1; k <= nf; ++k) {
      const cplx avg = 0.5 * (c(n, k) + std::conj(c(n, -k)));
      c(n, k) = avg;
      c(n, -k) = std::conj(avg);
    }
  }
}

double hermitian_defect(const CoefficientMatrix& c)
{
  double defect = 0.0;
  for (int n = 0; n < c.n_legendre(); ++n)
    for (int k = 0; k <= c.n_fourier(); ++k)
      defect = std::max(defect, std::abs(c(n, -k) - std::conj(c(n, k))));
  return defect;
}

int default_grid_points(const DomainConfig& domain)
{
  return 4 * domain.n_fourier + 2;
}

void write_snapshot_csv(const std::string& path, const PhaseSpaceGrid& grid)
{
  std::ofstream out(path);
  if (!out)
    throw IoError("cannot open snapshot file '" + path + "' for writing");
  out << "x,v,f\n";
  char buf[96];
  for (std::size_t j = 0; j < grid.x.size(); ++j)
    for (std::size_t l = 0; l < grid.v.size(); ++l) {
      std::snprintf(buf, sizeof buf, "%.16e,%.16e,%.16e\n", grid.x[j], grid.v[l], grid.at(j, l));
      out << buf;
    }
}

void write_snapshot_binary(const std::string& path, const PhaseSpaceGrid& grid, double length, double v_a,
                           double v_b)
{
  {
    std::ofstream out(path, std::ios::binary);
    if (!out)
      throw IoError("cannot open snapshot file '" + path + "' for writing");
    out.write(reinterpret_cast<const char*>(grid.values.data()),
              static_cast<std::streamsize>(grid.values.size() * sizeof(double)));
  }
  std::ofstream side(path + ".txt");
  if (!side)
    throw IoError("cannot open snapshot sidecar '" + path + ".txt' for writing");
  char buf[128];
  side << "n_x = " << grid.x.size() << "\n";
  side << "n_v = " << grid.v.size() << "\n";
  std::snprintf(buf, sizeof buf, "L = %.17g\nv_a = %.17g\nv_b = %.17g\n", length, v_a, v_b);
  side << buf;
  side << "layout = row-major [x][v] float64\n";
}

PhaseSpaceGrid read_snapshot_binary(const std::string& path)
{
  std::ifstream side(path + ".txt");
  if (!side)
    throw IoError("missing snapshot sidecar '" + path + ".txt'");
  std::map<std::string, std::string> fields;
  std::string line;
  while (std::getline(side, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    fields[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  for (const char* key : {"n_x", "n_v", "L", "v_a", "v_b"})
    if (!fields.count(key))
      throw IoError("snapshot sidecar '" + path + ".txt' lacks key '" + key + "'");
  const std::size_t nx = std::stoul(fields["n_x"]);
  const std::size_t nv = std::stoul(fields["n_v"]);
  const double length = std::stod(fields["L"]);
  const double va = std::stod(fields["v_a"]);
  const double vb = std::stod(fields["v_b"]);

  PhaseSpaceGrid grid;
  grid.x.resize(nx);
  grid.v.resize(nv);
  for (std::size_t j = 0; j < nx; ++j)
    grid.x[j] = length * static_cast<double>(j) / static_cast<double>(nx);
  for (std::size_t l = 0; l < nv; ++l)
    grid.v[l] = va + (vb - va) * static_cast<double>(l) / static_cast<double>(nv - 1);
  grid.values.resize(nx * nv);
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open snapshot file '" + path + "'");
  in.read(reinterpret_cast<char*>(grid.values.data()), static_cast<std::streamsize>(nx * nv * sizeof(double)));
  if (in.gcount() != static_cast<std::streamsize>(nx * nv * sizeof(double)))
    throw IoError("snapshot '" + path + "' is shorter than n_x * n_v doubles");
  return grid;
}

} // namespace lfvp
