#include "anisotex/besov.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "anisotex/parallel.hpp"

namespace anisotex {

double LatticeStep::length() const { return std::hypot(u, v); }

LatticeStep snap_direction(const Vec2& d) {
  const double len = std::hypot(d[0], d[1]);
  if (!(len > 0) || !std::isfinite(len)) throw DomainError("direction must be a nonzero vector");
  const double a = d[0] / len, b = d[1] / len;
  LatticeStep best;
  double best_cos = -2;
  for (int u = -8; u <= 8; ++u)
    for (int v = -8; v <= 8; ++v) {
      if ((u == 0 && v == 0) || std::gcd(u, v) != 1) continue;
      const double c = (u * a + v * b) / std::hypot(u, v);
      // strict improvement keeps the first (smallest) candidate on ties
      if (c > best_cos + 1e-15) {
        best_cos = c;
        best = {u, v};
      }
    }
  return best;
}

std::vector<int> default_lag_multiples(int n, LatticeStep step) {
  std::vector<int> out;
  const double len = step.length();
  for (int k = 0;; ++k) {
    const int m = static_cast<int>(std::lround(std::pow(2.0, 0.5 * k)));
    if (m * len / n > 0.25 + 1e-12) break;
    if (out.empty() || out.back() != m) out.push_back(m);
  }
  return out;
}

StructureFunction structure_function(const SampledField& field, const Vec2& direction, double p,
                                     const std::vector<double>& lags) {
  if (!(p >= 1)) throw DomainError("order p must be in [1, inf]");
  const int n = field.n;
  const LatticeStep s = snap_direction(direction);
  const double len = s.length();
  std::vector<int> mult;
  if (lags.empty()) {
    mult = default_lag_multiples(n, s);
  } else {
    for (double t : lags) {
      if (!(t > 0) || t > 0.25 + 1e-12) throw DomainError("lags must lie in (0, 1/4]");
      const int m = static_cast<int>(std::lround(t * n / len));
      if (m >= 1 && (mult.empty() || m > mult.back())) mult.push_back(m);
    }
  }
  if (mult.empty()) throw DomainError("no valid lags");

  StructureFunction sf;
  sf.direction = {s.u / len, s.v / len};
  sf.step = s;
  sf.p = p;
  sf.n = n;
  const int g = (n + 7) / 8;  // interior is [g, n-g)
  const bool sup = std::isinf(p);
  for (int m : mult) {
    const int du = m * s.u, dv = m * s.v;
    const int i0 = std::max(g, g - du), i1 = std::min(n - g, n - g - du);
    const int j0 = std::max(g, g - dv), j1 = std::min(n - g, n - g - dv);
    if (i0 >= i1 || j0 >= j1) continue;
    double acc = 0;
    for (int i = i0; i < i1; ++i) {
      const double* a = &field.values[static_cast<size_t>(i) * n];
      const double* b = &field.values[static_cast<size_t>(i + du) * n + dv];
      for (int j = j0; j < j1; ++j) {
        const double d = std::abs(b[j] - a[j]);
        if (sup)
          acc = std::max(acc, d);
        else if (p == 2)
          acc += d * d;
        else if (p == 1)
          acc += d;
        else
          acc += std::pow(d, p);
      }
    }
    if (!sup) acc /= static_cast<double>(i1 - i0) * (j1 - j0);
    sf.multiples.push_back(m);
    sf.lags.push_back(m * len / n);
    sf.values.push_back(acc);
  }
  if (sf.lags.empty()) throw DomainError("no lag fits inside the interior window");
  return sf;
}

FitRange default_fit_range(int n) { return {4.0 / n, 1.0 / 16}; }

DirectionalExponent directional_exponent(const StructureFunction& sf, std::optional<FitRange> range) {
  const FitRange r = range.value_or(default_fit_range(sf.n));
  std::vector<double> x, y;
  for (size_t k = 0; k < sf.lags.size(); ++k) {
    const double t = sf.lags[k];
    if (t < r.t_min * (1 - 1e-9) || t > r.t_max * (1 + 1e-9)) continue;
    if (!(sf.values[k] > 0)) {
      std::ostringstream os;
      os << "structure function vanishes along (" << sf.step.u << "," << sf.step.v << ") at t=" << t;
      throw DegenerateDirection(os.str());
    }
    x.push_back(std::log(t));
    y.push_back(std::log(sf.values[k]));
  }
  if (x.size() < 4) throw DomainError("fewer than 4 lags inside the fit range");
  const double k = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / k;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / k;
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  double ssr = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - my - slope * (x[i] - mx);
    ssr += e * e;
  }
  const double scale = std::isinf(sf.p) ? 1.0 : 1.0 / sf.p;
  DirectionalExponent d;
  d.h = slope * scale;
  d.std_error = std::sqrt(ssr / (k - 2) / sxx) * scale;
  d.fit_range = r;
  d.lag_count = static_cast<int>(x.size());
  if (!std::isfinite(d.h)) throw NumericalError("non-finite exponent");
  return d;
}

double critical_exponent(const SampledField& field, const Anisotropy& d, double p) {
  const double h1 = directional_exponent(structure_function(field, d.e1(), p)).h;
  const double h2 = directional_exponent(structure_function(field, d.e2(), p)).h;
  return std::min(d.lambda1() * h1, d.lambda2() * h2);
}

double tent_prediction(double alpha, double alpha0, double hurst) {
  if (!(alpha > 0 && alpha < 2) || !(alpha0 > 0 && alpha0 < 2))
    throw DomainError("tent_prediction needs alpha, alpha0 in (0,2)");
  return hurst * std::min(alpha / alpha0, (2 - alpha) / (2 - alpha0));
}

AxisExponents axis_exponents(const std::vector<SampledField>& fields, double p) {
  AxisExponents a;
  a.h1.resize(fields.size());
  a.h2.resize(fields.size());
  parallel_for(fields.size(), [&](size_t r) {
    a.h1[r] = directional_exponent(structure_function(fields[r], {1, 0}, p)).h;
    a.h2[r] = directional_exponent(structure_function(fields[r], {0, 1}, p)).h;
  });
  return a;
}

ExponentScan scan_anisotropy(const std::vector<SampledField>& fields,
                             const std::vector<double>& alpha_grid, double p) {
  if (fields.empty()) throw DomainError("scan needs at least one field");
  if (alpha_grid.empty()) throw DomainError("empty grid");
  for (double a : alpha_grid)
    if (!(a >= 0.2 - 1e-12 && a <= 1.8 + 1e-12)) throw DomainError("alpha grid must lie in [0.2, 1.8]");
  for (const auto& f : fields)
    if (f.n != fields[0].n) throw DomainError("fields have different sizes");

  // D(alpha) = diag(alpha, 2 - alpha) shares the axis eigenvectors, so the
  // directional exponents are measured once per field
  const AxisExponents ax = axis_exponents(fields, p);
  ExponentScan s;
  s.alphas = alpha_grid;
  const double R = static_cast<double>(fields.size());
  for (double a : alpha_grid) {
    const Anisotropy d = Anisotropy::diagonal(a);
    std::vector<double> v(fields.size());
    for (size_t r = 0; r < fields.size(); ++r)
      v[r] = std::min(d.axis_eigenvalue(0) * ax.h1[r], d.axis_eigenvalue(1) * ax.h2[r]);
    const double mu = std::accumulate(v.begin(), v.end(), 0.0) / R;
    double ss = 0;
    for (double x : v) ss += (x - mu) * (x - mu);
    s.exponents.push_back(mu);
    s.stderrs.push_back(R > 1 ? std::sqrt(ss / (R - 1) / R) : 0.0);
  }
  const double mx = *std::max_element(s.exponents.begin(), s.exponents.end());
  size_t best = 0;
  for (size_t i = 0; i < s.alphas.size(); ++i)
    if (s.exponents[i] >= mx - 1e-9 && (s.alphas[i] < s.alphas[best] || s.exponents[best] < mx - 1e-9))
      best = i;
  s.argmax_alpha = s.alphas[best];
  s.peak = s.exponents[best];
  return s;
}

}  // namespace anisotex
