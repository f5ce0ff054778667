#include <cmath>
#include <numeric>
#include <sstream>

#include "anisotex/homog.hpp"
#include "anisotex/parallel.hpp"
#include "anisotex/synth.hpp"
#include "quadrature.hpp"

namespace anisotex {

namespace {

// int_0^inf 2 (1 - cos p(r)) r^{-2H-1} dr with p(r) = A r^mu1 + B r^mu2
double radial(double A, double B, double mu1, double mu2, double H) {
  const double aa = std::abs(A), ab = std::abs(B);
  if (aa < 1e-300 && ab < 1e-300) return 0.0;
  auto mag = [&](double r) { return aa * std::pow(r, mu1) + ab * std::pow(r, mu2); };
  auto phase = [&](double r) { return A * std::pow(r, mu1) + B * std::pow(r, mu2); };
  auto dphase = [&](double r) { return mu1 * A * std::pow(r, mu1 - 1) + mu2 * B * std::pow(r, mu2 - 1); };
  const double e = -2 * H - 1;

  // below r0 the integrand is p^2 r^e to relative accuracy ~ p^2/12
  double r = 1.0;
  while (mag(r) > 1e-3) r *= 0.5;
  while (mag(2 * r) <= 1e-3) r *= 2;
  double sum = 0;
  {
    const double r0 = r;
    auto term = [&](double c, double k) { return c * std::pow(r0, k) / k; };
    sum += term(A * A, 2 * mu1 - 2 * H) + term(2 * A * B, mu1 + mu2 - 2 * H) + term(B * B, 2 * mu2 - 2 * H);
  }

  // past r_turn the phase derivative keeps one sign
  double r_turn = 0;
  if (A * B < 0 && mu2 > mu1) r_turn = std::pow(mu1 * aa / (mu2 * ab), 1.0 / (mu2 - mu1));
  if (mu2 == mu1 && std::abs(A + B) < 1e-14 * (aa + ab)) return sum;
  // stationary-phase value of -2 int cos(p) w around the turning point
  double turn_term = 0;
  if (r_turn > 0) {
    const double d2 = mu1 * (mu1 - 1) * A * std::pow(r_turn, mu1 - 2) +
                      mu2 * (mu2 - 1) * B * std::pow(r_turn, mu2 - 2);
    const double quarter = (d2 > 0 ? 0.25 : -0.25) * std::numbers::pi;
    turn_term = -2 * std::pow(r_turn, e) * std::sqrt(2 * std::numbers::pi / std::abs(d2)) *
                std::cos(phase(r_turn) + quarter);
  }

  constexpr double stop_phase = 400;
  for (int shell = 0; shell < 4000; ++shell) {
    const double r1 = 2 * r;
    // total variation of the phase over the shell
    double var = std::abs(phase(r1) - phase(r));
    if (r_turn > r && r_turn < r1) var = std::abs(phase(r_turn) - phase(r)) + std::abs(phase(r1) - phase(r_turn));
    const int panels = static_cast<int>(std::ceil(var / std::numbers::pi)) + 1;
    const double hstep = (r1 - r) / panels;
    for (int k = 0; k < panels; ++k)
      sum += detail::gauss_integrate<15>(r + k * hstep, r + (k + 1) * hstep, [&](double s) {
        return 2 * (1 - std::cos(phase(s))) * std::pow(s, e);
      });
    r = r1;
    const double dp = dphase(r);
    if (std::abs(r * dp) > stop_phase && (r > 2 * r_turn || r < 0.5 * r_turn)) {
      // non-oscillating part exactly, oscillating part to first order, plus
      // the turning point if it still lies ahead
      const double ahead = r < r_turn ? turn_term : 0.0;
      return sum + std::pow(r, -2 * H) / H + 2 * std::sin(phase(r)) * std::pow(r, e) / dp + ahead;
    }
  }
  std::ostringstream os;
  os << "radial quadrature did not reach the oscillatory regime (A=" << A << ", B=" << B << ")";
  throw NumericalError(os.str());
}

struct Snapped {
  int i, j;
};

Snapped snap(const Vec2& x, int n) {
  const long i = std::lround(x[0] * n), j = std::lround(x[1] * n);
  if (!std::isfinite(x[0]) || !std::isfinite(x[1]) || i < 0 || j < 0 || i >= n || j >= n) {
    std::ostringstream os;
    os << "point (" << x[0] << ", " << x[1] << ") is outside the sampled window [0,1)^2";
    throw DomainError(os.str());
  }
  return {static_cast<int>(i), static_cast<int>(j)};
}

double pooled_increment(const SampledField& f, Snapped s) {
  const int n = f.n;
  double acc = 0;
  for (int a = 0; a + s.i < n; ++a) {
    const double* lo = &f.values[static_cast<size_t>(a) * n];
    const double* hi = &f.values[static_cast<size_t>(a + s.i) * n + s.j];
    for (int b = 0; b + s.j < n; ++b) {
      const double d = hi[b] - lo[b];
      acc += d * d;
    }
  }
  return acc / (static_cast<double>(n - s.i) * (n - s.j));
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double ci95(const std::vector<double>& v) {
  if (v.size() < 2) return std::numeric_limits<double>::infinity();
  const double mu = mean(v);
  double ss = 0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return 1.96 * std::sqrt(ss / (v.size() - 1) / v.size());
}

void check_same_spec(const std::vector<SampledField>& fields) {
  if (fields.empty()) throw DomainError("no fields");
  for (const auto& f : fields)
    if (f.n != fields[0].n) throw DomainError("fields have different sizes");
}

}  // namespace

double variogram_oracle(const FieldSpec& spec, const Vec2& x) {
  require_valid(spec);
  if (x[0] == 0 && x[1] == 0) return 0.0;
  const auto rho = rho_for(spec);
  const detail::PolarFrame fr(spec.anisotropy);
  const double H = spec.hurst;
  const double ux1 = fr.u1[0] * x[0] + fr.u1[1] * x[1], ux2 = fr.u2[0] * x[0] + fr.u2[1] * x[1];
  // where the phase vanishes at r = 1; for equal eigenvalues it vanishes for every r and the
  // radial integral has a |c1 ux1 + c2 ux2|^{2H} cusp in the angle
  std::vector<double> kinks;
  {
    // c1 ux1 + c2 ux2 = (ux1 w1 + ux2 w2) . theta
    const double g1 = ux1 * fr.w1[0] + ux2 * fr.w2[0], g2 = ux1 * fr.w1[1] + ux2 * fr.w2[1];
    double z = std::atan2(-g1, g2);
    if (z < 0) z += std::numbers::pi;
    kinks.push_back(z);
  }
  const auto nodes = detail::half_circle_nodes(kinks);

  std::vector<double> part(nodes.size());
  parallel_for(nodes.size(), [&](size_t k) {
    const double phi = nodes[k].x;
    const Vec2 th{std::cos(phi), std::sin(phi)};
    auto [c1, c2] = fr.split(th);
    const double w = nodes[k].w * fr.jac(phi) * std::pow(rho(th), -2 * H - 2);
    part[k] = w * radial(c1 * ux1, c2 * ux2, fr.mu1, fr.mu2, H);
  });
  // the integrand is even in xi, so the half circle counts twice
  double v = 0;
  for (double p : part) v += p;
  return 2 * v;
}

VarianceEstimate estimate_variance(const std::vector<SampledField>& fields, const Vec2& x) {
  check_same_spec(fields);
  const Snapped s = snap(x, fields[0].n);
  VarianceEstimate e;
  std::vector<double> point;
  for (const auto& f : fields) {
    e.per_realization.push_back(pooled_increment(f, s));
    const double v = f(s.i, s.j);
    point.push_back(v * v);
  }
  e.pooled = mean(e.per_realization);
  e.pooled_ci = ci95(e.per_realization);
  e.pointwise = mean(point);
  e.pointwise_ci = ci95(point);
  return e;
}

ScalingCheck scaling_ratio(const std::vector<SampledField>& fields, double a, const Vec2& x) {
  check_same_spec(fields);
  const Mat2 ae = matrix_power(fields[0].spec.anisotropy, a);
  const Vec2 ax = ae * x;
  const int n = fields[0].n;
  const Snapped s0 = snap(x, n), s1 = snap(ax, n);
  std::vector<double> v0, v1;
  for (const auto& f : fields) {
    v0.push_back(pooled_increment(f, s0));
    v1.push_back(s1.i == s0.i && s1.j == s0.j ? v0.back() : pooled_increment(f, s1));
  }
  ScalingCheck c;
  const double m0 = mean(v0), m1 = mean(v1);
  c.ratio = m1 / m0;
  // delta method on the ratio of means
  std::vector<double> resid(v0.size());
  for (size_t r = 0; r < v0.size(); ++r) resid[r] = (v1[r] - c.ratio * v0[r]) / m0;
  c.ci_halfwidth = ci95(resid);
  c.target = std::pow(a, 2 * fields[0].spec.hurst);
  c.x = {static_cast<double>(s0.i) / n, static_cast<double>(s0.j) / n};
  c.ax = {static_cast<double>(s1.i) / n, static_cast<double>(s1.j) / n};
  return c;
}

ScalingCheck monte_carlo_scaling_check(const FieldSpec& spec, double a, const Vec2& x, int reps) {
  require_valid(spec);
  if (reps < 50) throw DomainError("monte_carlo_scaling_check needs reps >= 50");
  if (!(a > 0)) throw DomainError("scale factor must be positive");
  // validate both points before synthesizing anything
  snap(x, spec.grid_n);
  snap(matrix_power(spec.anisotropy, a) * x, spec.grid_n);
  return scaling_ratio(synthesize_ensemble(spec, reps), a, x);
}

}  // namespace anisotex
