#include "anisotex/synth.hpp"

#include <fftw3.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "anisotex/homog.hpp"
#include "anisotex/parallel.hpp"

namespace anisotex {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;
// quadrant cells per axis whose amplitude comes from an exact cell integral
constexpr int kExactCells = 16;

// FFTW planning is not thread-safe; execution is.
std::mutex& fftw_planner_mutex() {
  static std::mutex mu;
  return mu;
}

struct FftwBuffer {
  fftw_complex* p = nullptr;
  explicit FftwBuffer(size_t count) : p(fftw_alloc_complex(count)) {
    if (!p) throw NumericalError("fftw allocation failed");
  }
  ~FftwBuffer() { fftw_free(p); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
};

struct FftwPlan {
  fftw_plan p = nullptr;
  explicit FftwPlan(fftw_plan q) : p(q) {
    if (!p) throw NumericalError("fftw planning failed");
  }
  ~FftwPlan() {
    std::lock_guard lk(fftw_planner_mutex());
    fftw_destroy_plan(p);
  }
  FftwPlan(const FftwPlan&) = delete;
  FftwPlan& operator=(const FftwPlan&) = delete;
};

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// uniform in (0, 1]
double uniform(std::uint64_t key, std::uint64_t counter) {
  const std::uint64_t bits = splitmix(key + counter * 0x9e3779b97f4a7c15ULL);
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

struct Canonical {
  std::uint64_t index;
  bool conj;
  bool real;
  bool zero;
};

Canonical canonical(int m, int k1, int k2) {
  const int h = m / 2;
  auto neg = [h](int k) { return k == -h ? -h : -k; };
  bool conj = false;
  if (k2 < 0 && k2 != -h) {
    k1 = neg(k1);
    k2 = -k2;
    conj = true;
  } else if ((k2 == 0 || k2 == -h) && k1 < 0 && k1 != -h) {
    k1 = -k1;
    conj = true;
  }
  const std::uint64_t hm = static_cast<std::uint64_t>(h - 1);
  const std::uint64_t base1 = hm * static_cast<std::uint64_t>(m), base2 = base1 + hm, base3 = base2 + hm;
  if (k2 > 0) return {static_cast<std::uint64_t>(k2 - 1) * m + (k1 + h), conj, false, false};
  if (k2 == 0) {
    if (k1 > 0) return {base1 + (k1 - 1), conj, false, false};
    if (k1 == 0) return {0, false, false, true};
    return {base3, false, true, false};  // (-h, 0)
  }
  // k2 == -h
  if (k1 > 0) return {base2 + (k1 - 1), conj, false, false};
  if (k1 == 0) return {base3 + 1, false, true, false};
  return {base3 + 2, false, true, false};  // (-h, -h)
}

std::complex<double> draw(std::uint64_t key, const Canonical& c) {
  if (c.zero) return {0.0, 0.0};
  const double u1 = uniform(key, 2 * c.index), u2 = uniform(key, 2 * c.index + 1);
  if (c.real) return {std::sqrt(-2 * std::log(u1)) * std::cos(kTwoPi * u2), 0.0};
  const double r = std::sqrt(-std::log(u1)), t = kTwoPi * u2;
  return {r * std::cos(t), (c.conj ? -1.0 : 1.0) * r * std::sin(t)};
}

// Mass of rho^{-gamma} over [c1 - h/2, c1 + h/2] x [c2 - h/2, c2 + h/2]. Cells are split
// at the axes, where the density has its kinks.
double cell_mass(const HomogeneousFunction& rho, double gamma, double c1, double c2, double h) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  auto pieces = [](double c, double h) {
    std::vector<double> b{c - h / 2};
    if (c - h / 2 < 0 && c + h / 2 > 0) b.push_back(0);
    b.push_back(c + h / 2);
    return b;
  };
  const auto b1 = pieces(c1, h), b2 = pieces(c2, h);
  double acc = 0;
  for (size_t i = 0; i + 1 < b1.size(); ++i)
    acc += GK::integrate(
        [&](double x) {
          double row = 0;
          for (size_t j = 0; j + 1 < b2.size(); ++j)
            row += GK::integrate([&](double y) { return std::pow(rho({x, y}), -gamma); }, b2[j], b2[j + 1], 12, 1e-11);
          return row;
        },
        b1[i], b1[i + 1], 12, 1e-10);
  return acc;
}

using GridKey = std::tuple<double, double, int, int, int>;

std::shared_ptr<const SpectralGrid> cached_grid(const FieldSpec& s) {
  static std::mutex mu;
  static std::map<GridKey, std::weak_ptr<const SpectralGrid>> cache;
  const GridKey key{s.alpha0(), s.hurst, s.grid_n, s.padding, s.alias_terms};
  {
    std::lock_guard lk(mu);
    if (auto sp = cache[key].lock()) return sp;
  }
  auto grid = std::make_shared<const SpectralGrid>(build_spectral_grid(s));
  std::lock_guard lk(mu);
  cache[key] = grid;
  return grid;
}

}  // namespace

double SpectralGrid::frequency(int k) const { return kTwoPi * k / padding; }

double SpectralGrid::amplitude(int k1, int k2) const {
  return quadrant[static_cast<size_t>(std::abs(k1)) * (m / 2 + 1) + std::abs(k2)];
}

SpectralGrid build_spectral_grid(const FieldSpec& spec) {
  require_valid(spec);
  SpectralGrid g;
  g.n = spec.grid_n;
  g.padding = spec.padding;
  g.m = g.n * g.padding;
  g.cell = std::pow(kTwoPi / g.padding, 2);
  const int h = g.m / 2;
  std::vector<double> u(h + 1);
  for (int k = 0; k <= h; ++k) u[k] = g.frequency(k);
  const AliasedPowerSum dens(rho_for(spec), 2 * (spec.hurst + 1), kTwoPi * g.n, spec.alias_terms);

  g.quadrant.assign(static_cast<size_t>(h + 1) * (h + 1), 0.0);
  constexpr int block = 32;
  const int nblocks = (h + 1 + block - 1) / block;
  parallel_for(static_cast<size_t>(nblocks), [&](size_t b) {
    const int i0 = static_cast<int>(b) * block, i1 = std::min(h + 1, i0 + block);
    const auto rows = dens.table(std::vector<double>(u.begin() + i0, u.begin() + i1), u);
    for (int i = i0; i < i1; ++i)
      for (int j = 0; j <= h; ++j)
        g.quadrant[static_cast<size_t>(i) * (h + 1) + j] =
            std::sqrt(g.cell * rows[static_cast<size_t>(i - i0) * (h + 1) + j]);
  });
  // Near the origin the central image varies by orders of magnitude inside one cell: it
  // peaks along an axis in a band |xi2| < |xi1|^{(2 - alpha0)/alpha0}, much thinner than a
  // cell for alpha0 < 1. The midpoint rule overweights those modes, so use exact cell masses.
  const auto rho = rho_for(spec);
  const double gamma = 2 * (spec.hurst + 1);
  const int near = std::min(h, kExactCells);
  std::vector<std::pair<int, int>> cells;
  for (int i = 0; i <= near; ++i)
    for (int j = 0; j <= near; ++j)
      if (i || j) cells.emplace_back(i, j);
  parallel_for(cells.size(), [&](size_t c) {
    const auto [i, j] = cells[c];
    const double x = u[i], y = u[j];
    double& a = g.quadrant[static_cast<size_t>(i) * (h + 1) + j];
    const double images = a * a - g.cell * std::pow(rho({x, y}), -gamma);
    a = std::sqrt(cell_mass(rho, gamma, x, y, kTwoPi / g.padding) + std::max(images, 0.0));
  });
  g.quadrant[0] = 0.0;
  for (double a : g.quadrant)
    if (!std::isfinite(a)) throw NumericalError("non-finite spectral amplitude");
  return g;
}

std::uint64_t mode_index(int m, int k1, int k2) { return canonical(m, k1, k2).index; }

std::complex<double> mode_gaussian(std::uint64_t seed, int m, int k1, int k2) {
  return draw(splitmix(seed), canonical(m, k1, k2));
}

Synthesizer::Synthesizer(const FieldSpec& spec) : spec_(spec) {
  require_valid(spec_);
  grid_ = cached_grid(spec_);
}

SampledField Synthesizer::realize(std::uint64_t seed, SynthesisDiagnostics* diag) const {
  const SpectralGrid& g = *grid_;
  const int n = g.n, m = g.m, h = m / 2;
  const std::uint64_t key = splitmix(seed);
  const int chunk = std::min(m, 64);

  FftwBuffer rows(static_cast<size_t>(chunk) * m);
  FftwBuffer t(static_cast<size_t>(m) * n);  // stage-1 output: m frequency rows x n positions
  std::unique_ptr<FftwPlan> p1, p2;
  {
    std::lock_guard lk(fftw_planner_mutex());
    int len = m;
    p1 = std::make_unique<FftwPlan>(fftw_plan_many_dft(1, &len, chunk, rows.p, nullptr, 1, m, rows.p,
                                                       nullptr, 1, m, FFTW_BACKWARD, FFTW_ESTIMATE));
    p2 = std::make_unique<FftwPlan>(fftw_plan_many_dft(1, &len, n, t.p, nullptr, n, 1, t.p, nullptr,
                                                       n, 1, FFTW_BACKWARD, FFTW_ESTIMATE));
  }

  // stage 1: transform along k2 for every k1, keep positions j2 < n
  for (int base = 0; base < m; base += chunk) {
    for (int r = 0; r < chunk; ++r) {
      const int i1 = base + r, k1 = i1 < h ? i1 : i1 - m;
      fftw_complex* row = rows.p + static_cast<size_t>(r) * m;
      for (int i2 = 0; i2 < m; ++i2) {
        const int k2 = i2 < h ? i2 : i2 - m;
        const double a = g.amplitude(k1, k2);
        const std::complex<double> c = a == 0 ? std::complex<double>{} : a * draw(key, canonical(m, k1, k2));
        row[i2][0] = c.real();
        row[i2][1] = c.imag();
      }
    }
    fftw_execute_dft(p1->p, rows.p, rows.p);
    for (int r = 0; r < chunk; ++r)
      std::memcpy(t.p + static_cast<size_t>(base + r) * n, rows.p + static_cast<size_t>(r) * m,
                  sizeof(fftw_complex) * n);
  }
  // stage 2: transform along k1, keep j1 < n
  fftw_execute_dft(p2->p, t.p, t.p);

  SampledField f;
  f.n = n;
  f.spec = spec_;
  f.spec.seed = seed;
  f.values.resize(static_cast<size_t>(n) * n);
  const double y0 = t.p[0][0];
  double max_im = 0, max_abs = 0;
  for (size_t i = 0; i < f.values.size(); ++i) {
    f.values[i] = t.p[i][0] - y0;
    max_im = std::max(max_im, std::abs(t.p[i][1]));
    max_abs = std::max(max_abs, std::hypot(t.p[i][0], t.p[i][1]));
  }
  if (diag) *diag = {max_im, max_abs};
  if (max_im > 1e-9 * max_abs) throw NumericalError("synthesized field has an imaginary residue");
  return f;
}

SampledField synthesize(const FieldSpec& spec) { return Synthesizer(spec).realize(spec.seed); }

std::vector<SampledField> synthesize_ensemble(const FieldSpec& spec, int reps) {
  if (reps < 1) throw DomainError("need at least one realization");
  const Synthesizer syn(spec);
  std::vector<SampledField> out(reps);
  parallel_for(static_cast<size_t>(reps), [&](size_t r) { out[r] = syn.realize(spec.seed + r); });
  return out;
}

}  // namespace anisotex
