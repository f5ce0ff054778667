#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <set>

#include "anisotex/synth.hpp"
#include "doctest.h"

using namespace anisotex;
constexpr double kPi = std::numbers::pi;

namespace {

// Variogram for rho = |xi1| + |xi2| (alpha0 = 1) in Euclidean polar coordinates:
// the radial integral is 2 |<x,theta>|^{2H} int_0^inf (1 - cos u) u^{-2H-1} du,
// leaving a smooth one-dimensional angular integral.
double l1_variogram(double H, Vec2 x) {
  const double K = kPi / (2 * std::tgamma(2 * H + 1) * std::sin(kPi * H));
  auto f = [&](double t) {
    const double c = std::cos(t), s = std::sin(t);
    return 2 * K * std::pow(std::abs(x[0] * c + x[1] * s), 2 * H) * std::pow(std::abs(c) + std::abs(s), -2 * H - 2);
  };
  // split at the kinks: the axes and the zero of <x,theta>
  std::vector<double> cuts{0, kPi / 2, kPi, 3 * kPi / 2, 2 * kPi};
  double z = std::atan2(-x[0], x[1]);
  for (int k = 0; k < 3; ++k, z += kPi)
    if (z > 0 && z < 2 * kPi) cuts.push_back(z);
  std::sort(cuts.begin(), cuts.end());
  double acc = 0;
  for (size_t i = 0; i + 1 < cuts.size(); ++i)
    acc += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, cuts[i], cuts[i + 1], 15, 1e-13);
  return acc;
}

// E X(x)^2 of the synthesized field, straight from the spectral amplitudes.
double lattice_moment(const SpectralGrid& g, Vec2 x) {
  const int h = g.m / 2;
  double acc = 0;
  for (int k1 = -h; k1 < h; ++k1)
    for (int k2 = -h; k2 < h; ++k2) {
      const double a = g.amplitude(k1, k2);
      const double ph = x[0] * g.frequency(k1) + x[1] * g.frequency(k2);
      acc += a * a * 2 * (1 - std::cos(ph));
    }
  return acc;
}

}  // namespace

TEST_CASE("oracle matches the closed-form isotropic reduction") {
  // frozen: H = 0.5 gives exactly 3 pi |x| / (2 sqrt 2) along the diagonal, i.e. 3 pi / 2 at (0.5,0.5)
  CHECK(l1_variogram(0.5, {0.5, 0.5}) == doctest::Approx(3 * kPi / 2).epsilon(1e-10));
  const auto iso = make_field_spec(1.0, 0.5, 256, 0);
  CHECK(variogram_oracle(iso, {0.5, 0.5}) == doctest::Approx(4.71238898).epsilon(1e-6));
  CHECK(variogram_oracle(iso, {0.25, 0.25}) == doctest::Approx(2.35619449).epsilon(1e-6));
  for (double H : {0.3, 0.5, 0.8}) {
    const auto s = make_field_spec(1.0, H, 256, 0);
    for (Vec2 x : {Vec2{0.5, 0.0}, Vec2{0.2, 0.7}, Vec2{-0.3, 0.1}})
      CHECK(variogram_oracle(s, x) == doctest::Approx(l1_variogram(H, x)).epsilon(1e-6));
  }
}

TEST_CASE("oracle basics") {
  const auto iso = make_field_spec(1.0, 0.5, 256, 0);
  CHECK(variogram_oracle(iso, {0, 0}) == 0.0);
  // v(x) = C |x|^{2H} along an axis
  CHECK(variogram_oracle(iso, {0.5, 0}) == doctest::Approx(variogram_oracle(iso, {1, 0}) * 0.5).epsilon(1e-6));
  const auto an = make_field_spec(0.6, 0.4, 256, 0);
  // frozen values of the anisotropic case
  CHECK(variogram_oracle(an, {0.2, 0.1}) == doctest::Approx(3.1297847).epsilon(1e-6));
  CHECK(variogram_oracle(an, {0.25, 0.25}) == doctest::Approx(5.1458487).epsilon(1e-6));
  CHECK(variogram_oracle(an, {0.5, 0.5}) == doctest::Approx(8.2527563).epsilon(1e-6));
}

TEST_CASE("oracle scaling identity") {
  const auto s = make_field_spec(0.6, 0.4, 256, 0);
  const Vec2 x{0.25, 0.25};
  const double a = 2;
  const Vec2 ax{std::pow(a, 0.6) * x[0], std::pow(a, 1.4) * x[1]};
  CHECK(variogram_oracle(s, ax) == doctest::Approx(std::pow(a, 0.8) * variogram_oracle(s, x)).epsilon(1e-3));
}

TEST_CASE("spectral lattice reproduces the oracle second moment") {
  for (auto [a0, H] : {std::pair{0.6, 0.4}, {1.0, 0.5}}) {
    const auto spec = make_field_spec(a0, H, 128, 0);
    const auto g = build_spectral_grid(spec);
    for (Vec2 x : {Vec2{0.2, 0.1}, Vec2{0.25, 0.25}, Vec2{0.1, 0.3}, Vec2{1.0 / 128, 0}}) {
      INFO("alpha0 = " << a0 << ", x = (" << x[0] << ", " << x[1] << ")");
      CHECK(lattice_moment(g, x) == doctest::Approx(variogram_oracle(spec, x)).epsilon(0.025));
    }
  }
}

TEST_CASE("large-lag deficit is low-frequency truncation and shrinks with padding") {
  // the torus drops everything below 2 pi / padding; long lags feel it most
  auto spec = make_field_spec(0.6, 0.4, 64, 0);
  const Vec2 x{0.5, 0.125};
  const double want = variogram_oracle(spec, x);
  const double r4 = lattice_moment(build_spectral_grid(spec), x) / want - 1;
  spec.padding = 8;
  const double r8 = lattice_moment(build_spectral_grid(spec), x) / want - 1;
  CHECK(r4 < 0);
  CHECK(r8 < 0);
  CHECK(std::abs(r8) < 0.6 * std::abs(r4));
}

TEST_CASE("spectral grid invariants") {
  const auto g = build_spectral_grid(make_field_spec(0.6, 0.4, 64, 0));
  CHECK(g.m == 256);
  CHECK(g.amplitude(0, 0) == 0.0);
  CHECK(g.amplitude(3, -5) == g.amplitude(-3, 5));
  for (double a : g.quadrant) CHECK(std::isfinite(a));
  CHECK(g.amplitude(1, 0) > g.amplitude(2, 0));
}

TEST_CASE("mode stream: Hermitian, real self-conjugate modes, enumeration order") {
  const int m = 8, h = m / 2;
  std::set<std::uint64_t> seen;
  for (int k1 = -h; k1 < h; ++k1)
    for (int k2 = -h; k2 < h; ++k2) {
      if (k1 == 0 && k2 == 0) {
        CHECK(mode_gaussian(5, m, 0, 0) == std::complex<double>{});
        continue;
      }
      const int c1 = k1 == -h ? -h : -k1, c2 = k2 == -h ? -h : -k2;
      const auto g = mode_gaussian(5, m, k1, k2);
      CHECK(mode_gaussian(5, m, c1, c2) == std::conj(g));
      CHECK(mode_index(m, k1, k2) == mode_index(m, c1, c2));
      if (c1 == k1 && c2 == k2) CHECK(g.imag() == 0.0);
      seen.insert(mode_index(m, k1, k2));
    }
  // (m^2 - 4)/2 conjugate pairs plus three self-conjugate nonzero modes
  CHECK(seen.size() == (m * m - 4) / 2 + 3);
  CHECK(*seen.rbegin() == seen.size() - 1);
  CHECK(mode_index(m, -h, 1) == 0);
  CHECK(mode_index(m, 1, 0) == static_cast<std::uint64_t>(m * (h - 1)));
  CHECK(mode_gaussian(5, m, 1, 2) != mode_gaussian(6, m, 1, 2));
}

TEST_CASE("mode stream moments") {
  const int m = 256;
  double s2 = 0, s11 = 0, re2 = 0;
  int cnt = 0;
  for (int k1 = 1; k1 < 120; ++k1)
    for (int k2 = 1; k2 < 120; ++k2) {
      const auto g = mode_gaussian(99, m, k1, k2);
      s2 += std::norm(g);
      s11 += g.real() * g.imag();
      re2 += g.real() * g.real();
      ++cnt;
    }
  CHECK(s2 / cnt == doctest::Approx(1.0).epsilon(0.03));
  CHECK(re2 / cnt == doctest::Approx(0.5).epsilon(0.04));
  CHECK(std::abs(s11 / cnt) < 0.02);
}

TEST_CASE("realizations: origin, determinism, realness") {
  const auto spec = make_field_spec(0.6, 0.4, 128, 42);
  const auto a = synthesize(spec), b = synthesize(spec);
  CHECK(a.values == b.values);
  CHECK(a(0, 0) == 0.0);
  CHECK(a.spec.seed == 42);
  for (double v : a.values) REQUIRE(std::isfinite(v));
  SynthesisDiagnostics d;
  const auto c = Synthesizer(spec).realize(43, &d);
  CHECK(c(0, 0) == 0.0);
  CHECK(d.max_imag < 1e-9 * d.max_abs);
  CHECK(c.values != a.values);
  const auto ens = synthesize_ensemble(spec, 3);
  CHECK(ens[0].values == a.values);
  CHECK(ens[1].values == c.values);
  CHECK_THROWS_AS(synthesize(FieldSpec{Anisotropy::diagonal(0.6), 0.7, "power_sum", 64, 0}), DomainError);
}

TEST_CASE("point values are Gaussian") {
  const auto ens = synthesize_ensemble(make_field_spec(0.6, 0.4, 64, 777), 500);
  for (auto [i, j] : {std::pair{16, 16}, {40, 8}}) {
    double m1 = 0;
    for (const auto& f : ens) m1 += f(i, j);
    m1 /= ens.size();
    double m2 = 0, m3 = 0, m4 = 0;
    for (const auto& f : ens) {
      const double d = f(i, j) - m1;
      m2 += d * d, m3 += d * d * d, m4 += d * d * d * d;
    }
    m2 /= ens.size(), m3 /= ens.size(), m4 /= ens.size();
    const double skew = m3 / std::pow(m2, 1.5), kurt = m4 / (m2 * m2);
    const double jb = ens.size() / 6.0 * (skew * skew + (kurt - 3) * (kurt - 3) / 4);
    CHECK(jb < 10.597);  // chi-square(2) at 0.5%: two points, 1% family-wise
  }
}

TEST_CASE("increments are stationary") {
  const auto spec = make_field_spec(0.6, 0.4, 64, 2024);
  const auto ens = synthesize_ensemble(spec, 200);
  auto incr_var = [&](int i, int j, int di, int dj) {
    double s = 0;
    for (const auto& f : ens) s += std::pow(f(i + di, j + dj) - f(i, j), 2);
    return s / ens.size();
  };
  const double want = lattice_moment(build_spectral_grid(spec), {4.0 / 64, 2.0 / 64});
  for (auto [i, j] : {std::pair{10, 10}, {30, 20}, {45, 40}})
    CHECK(incr_var(i, j, 4, 2) == doctest::Approx(want).epsilon(0.1));
}

TEST_CASE("variance estimation and the scaling ratio") {
  const auto spec = make_field_spec(1.0, 0.5, 64, 10);
  const auto ens = synthesize_ensemble(spec, 60);
  const auto v = estimate_variance(ens, {0.25, 0.25});
  CHECK(v.per_realization.size() == 60);
  CHECK(v.pooled_ci > 0);
  CHECK(v.pooled == doctest::Approx(lattice_moment(build_spectral_grid(spec), {0.25, 0.25})).epsilon(0.1));
  CHECK_THROWS_AS(estimate_variance(ens, {1.5, 0.2}), DomainError);
  const auto one = scaling_ratio(ens, 1.0, {0.2, 0.3});
  CHECK(one.ratio == 1.0);
  CHECK(one.target == 1.0);
  CHECK_THROWS_AS(scaling_ratio(ens, 4.0, {0.5, 0.5}), DomainError);
  CHECK_THROWS_AS(monte_carlo_scaling_check(spec, 2.0, {0.1, 0.1}, 10), DomainError);
}
