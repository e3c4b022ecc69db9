#pragma once

#include "lfvp/legendre.hpp"

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lfvp {

using cplx = std::complex<double>;

/// Phase-space box [0, length] x [v_a, v_b] and spectral resolution.
/// Fourier modes run over k in [-n_fourier, n_fourier].
struct DomainConfig
{
  double length = 1.0;
  double v_a = -5.0;
  double v_b = 5.0;
  int n_legendre = 4;
  int n_fourier = 1;
  double epsilon0 = 1.0;

  int n_k() const { return 2 * n_fourier + 1; }
  void validate() const;
};

enum class PenaltyMode
{
  none,
  all_modes,
  skip_first_three,
  adaptive,
};

std::string to_string(PenaltyMode mode);
PenaltyMode penalty_mode_from_string(const std::string& name);

struct Species
{
  std::string name = "e";
  double charge = -1.0;
  double mass = 1.0;
  double nu = 0.0;
  double gamma = 0.5;
  PenaltyMode penalty_mode = PenaltyMode::skip_first_three;
  /// Per-species velocity window; falls back to the domain bounds.
  std::optional<double> v_a;
  std::optional<double> v_b;

  void validate() const;
};

/// Fourier coefficients g_k for k in [-n_fourier, n_fourier].
class ModeVector
{
public:
  ModeVector() = default;
  explicit ModeVector(int n_fourier) : nf_(n_fourier), c_(2 * n_fourier + 1) {}

  int n_fourier() const { return nf_; }
  int size() const { return 2 * nf_ + 1; }

  cplx& operator[](int k) { return c_[k + nf_]; }
  const cplx& operator[](int k) const { return c_[k + nf_]; }

  std::span<cplx> values() { return c_; }
  std::span<const cplx> values() const { return c_; }

private:
  int nf_ = 0;
  std::vector<cplx> c_;
};

/// Electric field modes E_k; E_0 = 0 and E_{-k} = conj(E_k).
using FieldModes = ModeVector;

/// Legendre-Fourier coefficients C[n][k] of one species; rows (fixed n) are contiguous in k.
class CoefficientMatrix
{
public:
  CoefficientMatrix() = default;
  CoefficientMatrix(int n_legendre, int n_fourier)
      : nl_(n_legendre), nf_(n_fourier), data_(static_cast<std::size_t>(n_legendre) * (2 * n_fourier + 1))
  {
  }

  int n_legendre() const { return nl_; }
  int n_fourier() const { return nf_; }
  int n_k() const { return 2 * nf_ + 1; }

  cplx& operator()(int n, int k) { return data_[static_cast<std::size_t>(n) * n_k() + (k + nf_)]; }
  const cplx& operator()(int n, int k) const { return data_[static_cast<std::size_t>(n) * n_k() + (k + nf_)]; }

  std::span<cplx> row(int n) { return {data_.data() + static_cast<std::size_t>(n) * n_k(), static_cast<std::size_t>(n_k())}; }
  std::span<const cplx> row(int n) const
  {
    return {data_.data() + static_cast<std::size_t>(n) * n_k(), static_cast<std::size_t>(n_k())};
  }

  /// Legendre column (all n) of Fourier mode k.
  std::vector<cplx> column(int k) const;
  void set_column(int k, std::span<const cplx> values);

  std::span<cplx> data() { return data_; }
  std::span<const cplx> data() const { return data_; }

  void fill(cplx value) { std::fill(data_.begin(), data_.end(), value); }

private:
  int nl_ = 0;
  int nf_ = 0;
  std::vector<cplx> data_;
};

/// One coefficient matrix per kinetic species.
using SpectralState = std::vector<CoefficientMatrix>;

/// [g * h]_k = sum_{k'} g_{k'} h_{k-k'}, h zero outside [-N_F, N_F], output truncated.
ModeVector convolve(const ModeVector& g, const ModeVector& h);

/// out[k] += scale * [g * h]_k on raw spans of length 2 n_fourier + 1.
void convolve_accumulate(std::span<const cplx> g, std::span<const cplx> h, cplx scale, std::span<cplx> out);

/// Separable initial condition g(v) (1 + epsilon cos(2 pi wavenumber x / L)).
struct InitialProfile
{
  enum class Kind
  {
    maxwellian,
    two_stream,
    custom,
  };

  Kind kind = Kind::maxwellian;
  double alpha = 1.0;   ///< thermal spread (standard deviation)
  double drift = 0.0;   ///< drift of a Maxwellian, beam speed of a two-stream profile
  double density = 1.0;
  double epsilon = 0.0;
  int wavenumber = 1;
  std::function<double(double)> custom;

  static InitialProfile maxwellian(double alpha, double drift, double epsilon, int wavenumber);
  static InitialProfile two_stream(double alpha, double beam_speed, double epsilon, int wavenumber);
  static InitialProfile separable(std::function<double(double)> g, double epsilon, int wavenumber);

  /// Velocity profile g(v).
  double velocity_profile(double v) const;
};

std::string to_string(InitialProfile::Kind kind);

/// Projects the profile onto the basis (Gauss-Legendre, default_quadrature_nodes()).
/// Throws ConfigError when |g| at either velocity bound exceeds tail_tolerance * max|g|.
CoefficientMatrix project_initial(const DomainConfig& domain, const VelocityBasis& basis,
                                  const InitialProfile& profile, double tail_tolerance = 1e-5);

/// f on a tensor grid; values are row-major [ix][iv].
struct PhaseSpaceGrid
{
  std::vector<double> x;
  std::vector<double> v;
  std::vector<double> values;
  double max_imag_residue = 0.0;

  double at(std::size_t ix, std::size_t iv) const { return values[ix * v.size() + iv]; }
};

/// f(x_j, v_l) with x_j = j L / n_x and v_l uniform over [v_a, v_b] inclusive.
/// Throws when n_x < 2 N_F + 1 or the imaginary residue exceeds 1e-10.
PhaseSpaceGrid reconstruct_f(const DomainConfig& domain, const VelocityBasis& basis, const CoefficientMatrix& c,
                             int n_x, int n_v);

/// f at arbitrary points (tensor product of xs and vs).
PhaseSpaceGrid reconstruct_at(const DomainConfig& domain, const VelocityBasis& basis, const CoefficientMatrix& c,
                              std::span<const double> xs, std::span<const double> vs);

/// Fourier modes of f(x, v_a) and f(x, v_b).
struct BoundaryValues
{
  ModeVector at_va;
  ModeVector at_vb;
};

BoundaryValues boundary_values(const CoefficientMatrix& c, const VelocityBasis& basis);

/// Averages C[n][k] with conj(C[n][-k]); zeroes Im C[n][0].
void symmetrize(CoefficientMatrix& c);

/// max |C[n][-k] - conj(C[n][k])| over the matrix.
double hermitian_defect(const CoefficientMatrix& c);

/// Default diagnostics grid size in x: 4 N_F + 2.
int default_grid_points(const DomainConfig& domain);

// Snapshot files: CSV with header "x,v,f", or a raw row-major double block plus a
// text sidecar (<path>.txt) recording n_x, n_v, L, v_a, v_b.
void write_snapshot_csv(const std::string& path, const PhaseSpaceGrid& grid);
void write_snapshot_binary(const std::string& path, const PhaseSpaceGrid& grid, double length, double v_a,
                           double v_b);
PhaseSpaceGrid read_snapshot_binary(const std::string& path);

} // namespace lfvp
