#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include "anisotex/core.hpp"

namespace anisotex {

// Spectral amplitudes on the padded frequency lattice xi_k = 2 pi k / L,
// k in [-m/2, m/2)^2 with m = n L. The field lives on a torus of side L and
// only the unit window [0,1]^2 is returned. Amplitudes are stored for one
// quadrant (|k1|, |k2|) since power-sum densities are even in each axis.
struct SpectralGrid {
  int n = 0;        // samples per unit
  int padding = 1;  // L
  int m = 0;        // n * L
  double cell = 0;  // (2 pi / L)^2
  std::vector<double> quadrant;  // (m/2+1)^2 amplitudes A(|k1|,|k2|), A(0,0) = 0

  double frequency(int k) const;
  double amplitude(int k1, int k2) const;
};

// A(k)^2 = cell * sum over aliases of rho(xi_k + 2 pi n m)^{-2(H+1)}
SpectralGrid build_spectral_grid(const FieldSpec& spec);

// Mode stream: complex standard Gaussian (E|g|^2 = 1) attached to lattice
// index (k1, k2) of an m x m grid, Hermitian (g_{-k} = conj g_k), zero at k=0,
// real N(0,1) on the self-conjugate Nyquist modes.
std::complex<double> mode_gaussian(std::uint64_t seed, int m, int k1, int k2);

// Position of the canonical member of a conjugate pair in the stream:
//   k2 in (0, m/2), k1 in [-m/2, m/2)  row-major
//   k2 = 0,    k1 in (0, m/2)
//   k2 = -m/2, k1 in (0, m/2)
//   (-m/2, 0), (0, -m/2), (-m/2, -m/2)
std::uint64_t mode_index(int m, int k1, int k2);

struct SynthesisDiagnostics {
  double max_imag = 0;  // max |Im Y| before taking the real part
  double max_abs = 0;   // max |Y|
};

class Synthesizer {
 public:
  explicit Synthesizer(const FieldSpec& spec);

  SampledField realize(std::uint64_t seed, SynthesisDiagnostics* diag = nullptr) const;
  const FieldSpec& spec() const { return spec_; }
  const SpectralGrid& grid() const { return *grid_; }

 private:
  FieldSpec spec_;
  std::shared_ptr<const SpectralGrid> grid_;
};

SampledField synthesize(const FieldSpec& spec);

// Realizations with seeds spec.seed, spec.seed+1, ... built in parallel.
std::vector<SampledField> synthesize_ensemble(const FieldSpec& spec, int reps);

// E X(x)^2 by anisotropic polar quadrature of
//   int 2 (1 - cos<x,xi>) rho(xi)^{-2(H+1)} dxi
double variogram_oracle(const FieldSpec& spec, const Vec2& x);

struct VarianceEstimate {
  double pooled = 0;     // mean over translates y of (X(y+x) - X(y))^2, all realizations
  double pooled_ci = 0;  // 95% half-width from realization-to-realization spread
  double pointwise = 0;  // plain sample second moment of X(x)
  double pointwise_ci = 0;
  std::vector<double> per_realization;  // translate-pooled value per field
};

// x is snapped to the nearest lattice point; throws DomainError outside [0,1)^2.
VarianceEstimate estimate_variance(const std::vector<SampledField>& fields, const Vec2& x);

struct ScalingCheck {
  double ratio = 0;
  double ci_halfwidth = 0;
  double target = 0;  // a^{2H}
  Vec2 x{}, ax{};     // lattice points actually used
};

ScalingCheck monte_carlo_scaling_check(const FieldSpec& spec, double a, const Vec2& x, int reps);
ScalingCheck scaling_ratio(const std::vector<SampledField>& fields, double a, const Vec2& x);

}  // namespace anisotex
