#include "anisotex/hywave.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <complex>
#include <limits>
#include <numbers>

namespace anisotex {

namespace {

std::vector<double> highpass(const std::vector<double>& h) {
  const size_t k = h.size();
  std::vector<double> g(k);
  for (size_t i = 0; i < k; ++i) g[i] = (i % 2 ? -1.0 : 1.0) * h[k - 1 - i];
  return g;
}

// one periodic analysis step on x[0..len) read with stride; output in Mallat order
void forward_step(double* x, size_t stride, int len, const std::vector<double>& h,
                  const std::vector<double>& g, std::vector<double>& tmp) {
  const int half = len / 2, taps = static_cast<int>(h.size());
  tmp.assign(len, 0.0);
  for (int k = 0; k < half; ++k) {
    double a = 0, d = 0;
    for (int t = 0; t < taps; ++t) {
      const double v = x[static_cast<size_t>((2 * k + t) % len) * stride];
      a += h[t] * v;
      d += g[t] * v;
    }
    tmp[k] = a;
    tmp[half + k] = d;
  }
  for (int i = 0; i < len; ++i) x[static_cast<size_t>(i) * stride] = tmp[i];
}

void inverse_step(double* x, size_t stride, int len, const std::vector<double>& h,
                  const std::vector<double>& g, std::vector<double>& tmp) {
  const int half = len / 2, taps = static_cast<int>(h.size());
  tmp.assign(len, 0.0);
  for (int k = 0; k < half; ++k) {
    const double a = x[static_cast<size_t>(k) * stride], d = x[static_cast<size_t>(half + k) * stride];
    for (int t = 0; t < taps; ++t) tmp[(2 * k + t) % len] += h[t] * a + g[t] * d;
  }
  for (int i = 0; i < len; ++i) x[static_cast<size_t>(i) * stride] = tmp[i];
}

void check_levels(int n, int J1, int J2) {
  int log2n = 0;
  while ((1 << log2n) < n) ++log2n;
  if (!is_power_of_two(n)) throw DomainError("field size must be a power of two");
  if (J1 < 1 || J2 < 1 || J1 > log2n || J2 > log2n)
    throw DomainError("levels (" + std::to_string(J1) + "," + std::to_string(J2) +
                      ") infeasible for n = " + std::to_string(n) + " (each must be in [1, " +
                      std::to_string(log2n) + "])");
}

int ilog2(int n) {
  int k = 0;
  while ((1 << k) < n) ++k;
  return k;
}

}  // namespace

std::string filter_name(WaveletFilter f) { return f == WaveletFilter::haar ? "haar" : "d4"; }

WaveletFilter filter_from_name(const std::string& name) {
  if (name == "haar") return WaveletFilter::haar;
  if (name == "d4") return WaveletFilter::d4;
  throw DomainError("unknown filter '" + name + "' (expected haar or d4)");
}

const std::vector<double>& lowpass_taps(WaveletFilter f) {
  static const std::vector<double> haar{std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2};
  static const std::vector<double> d4 = [] {
    const double s3 = std::sqrt(3.0), d = 4 * std::numbers::sqrt2;
    return std::vector<double>{(1 + s3) / d, (3 + s3) / d, (3 - s3) / d, (1 - s3) / d};
  }();
  return f == WaveletFilter::haar ? haar : d4;
}

double center_frequency(WaveletFilter f) {
  const auto& h = lowpass_taps(f);
  const auto g = highpass(h);
  auto resp = [](const std::vector<double>& c, double w) {
    std::complex<double> s = 0;
    for (size_t t = 0; t < c.size(); ++t) s += c[t] * std::polar(1.0, -w * static_cast<double>(t));
    return std::abs(s);
  };
  constexpr int level = 12;
  double best_w = 0, best = -1;
  // the level-l wavelet lives below pi / 2^(l-2)
  const double wmax = std::numbers::pi / std::ldexp(1.0, level - 2);
  for (int i = 1; i <= 20000; ++i) {
    const double w = wmax * i / 20000;
    double v = resp(g, std::ldexp(w, level - 1));
    for (int k = 0; k < level - 1; ++k) v *= resp(h, std::ldexp(w, k));
    if (v > best) {
      best = v;
      best_w = w;
    }
  }
  return best_w * std::ldexp(1.0, level) / (2 * std::numbers::pi);
}

size_t HyperbolicPyramid::block_size(int l1, int l2) const {
  return static_cast<size_t>(n >> l1) * static_cast<size_t>(n >> l2);
}

std::vector<double> HyperbolicPyramid::block(int l1, int l2) const {
  if (l1 < 1 || l2 < 1 || l1 > J1 || l2 > J2) throw DomainError("block index out of range");
  const int i0 = n >> l1, j0 = n >> l2;
  std::vector<double> out;
  out.reserve(block_size(l1, l2));
  for (int i = i0; i < 2 * i0; ++i)
    for (int j = j0; j < 2 * j0; ++j) out.push_back(coeffs[static_cast<size_t>(i) * n + j]);
  return out;
}

HyperbolicPyramid hyperbolic_transform(const SampledField& field, WaveletFilter filter, int J1, int J2) {
  const int n = field.n;
  check_levels(n, J1, J2);
  HyperbolicPyramid p;
  p.n = n;
  p.J1 = J1;
  p.J2 = J2;
  p.filter = filter;
  p.coeffs = field.values;
  const auto& h = lowpass_taps(filter);
  const auto g = highpass(h);
  std::vector<double> tmp;
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < J2; ++l) forward_step(&p.coeffs[static_cast<size_t>(i) * n], 1, n >> l, h, g, tmp);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < J1; ++l) forward_step(&p.coeffs[j], n, n >> l, h, g, tmp);
  return p;
}

std::vector<double> inverse_transform(const HyperbolicPyramid& pyr) {
  const int n = pyr.n;
  std::vector<double> x = pyr.coeffs;
  const auto& h = lowpass_taps(pyr.filter);
  const auto g = highpass(h);
  std::vector<double> tmp;
  for (int j = 0; j < n; ++j)
    for (int l = pyr.J1 - 1; l >= 0; --l) inverse_step(&x[j], n, n >> l, h, g, tmp);
  for (int i = 0; i < n; ++i)
    for (int l = pyr.J2 - 1; l >= 0; --l) inverse_step(&x[static_cast<size_t>(i) * n], 1, n >> l, h, g, tmp);
  return x;
}

bool ScaleStatistics::empty(int l1, int l2) const { return std::isinf(at(l1, l2)); }

ScaleStatistics scale_statistics(const HyperbolicPyramid& pyr, double p) {
  return scale_statistics(std::vector<HyperbolicPyramid>{pyr}, p);
}

ScaleStatistics scale_statistics(const std::vector<HyperbolicPyramid>& pyrs, double p) {
  if (pyrs.empty()) throw DomainError("no pyramids");
  if (!(p >= 1)) throw DomainError("order p must be in [1, inf]");
  const auto& f = pyrs.front();
  for (const auto& q : pyrs)
    if (q.n != f.n || q.J1 != f.J1 || q.J2 != f.J2 || q.filter != f.filter)
      throw DomainError("pyramids differ in size, levels or filter");
  ScaleStatistics s;
  s.log2n = ilog2(f.n);
  s.J1 = f.J1;
  s.J2 = f.J2;
  s.p = p;
  s.filter = f.filter;
  const bool sup = std::isinf(p);
  for (int l1 = 1; l1 <= f.J1; ++l1)
    for (int l2 = 1; l2 <= f.J2; ++l2) {
      double acc = 0;
      size_t count = 0;
      for (const auto& q : pyrs) {
        const int i0 = q.n >> l1, j0 = q.n >> l2;
        for (int i = i0; i < 2 * i0; ++i)
          for (int j = j0; j < 2 * j0; ++j) {
            const double d = std::abs(q.coeffs[static_cast<size_t>(i) * q.n + j]);
            acc = sup ? std::max(acc, d) : acc + (p == 2 ? d * d : std::pow(d, p));
          }
        count += q.block_size(l1, l2);
      }
      const double stat = sup ? acc : std::pow(acc / count, 1.0 / p);
      s.log2_stat.push_back(stat > 0 ? std::log2(stat) : -std::numeric_limits<double>::infinity());
      s.counts.push_back(static_cast<double>(count));
    }
  return s;
}

ScaleStatistics transpose(const ScaleStatistics& s) {
  ScaleStatistics t = s;
  t.J1 = s.J2;
  t.J2 = s.J1;
  for (int l1 = 1; l1 <= t.J1; ++l1)
    for (int l2 = 1; l2 <= t.J2; ++l2) {
      const size_t to = static_cast<size_t>(l1 - 1) * t.J2 + (l2 - 1), from = static_cast<size_t>(l2 - 1) * s.J2 + (l1 - 1);
      t.log2_stat[to] = s.log2_stat[from];
      if (!s.counts.empty()) t.counts[to] = s.counts[from];
    }
  return t;
}

namespace {

constexpr int kRatioSteps = 80;
constexpr double kRatioMax = 6.5;

// (ratio, alpha, 2 - alpha) with exact mirror symmetry between k and -k
struct Ray {
  double ratio, a1, a2;
};

std::vector<Ray> rays() {
  std::vector<Ray> pos(kRatioSteps + 1);
  for (int k = 0; k <= kRatioSteps; ++k) {
    const double r = std::pow(kRatioMax, static_cast<double>(k) / kRatioSteps);
    const double a = k == 0 ? 1.0 : 2 * r / (1 + r);
    pos[k] = {r, a, 2 - a};
  }
  std::vector<Ray> out;
  for (int k = kRatioSteps; k >= 1; --k) out.push_back({1.0 / pos[k].ratio, pos[k].a2, pos[k].a1});
  for (int k = 0; k <= kRatioSteps; ++k) out.push_back(pos[k]);
  return out;
}

}  // namespace

std::vector<double> ratio_grid() {
  std::vector<double> g;
  for (const auto& r : rays()) g.push_back(r.ratio);
  return g;
}

RatioResult ratio_maximize(const ScaleStatistics& st) {
  const double c = std::log2(2 * std::numbers::pi * center_frequency(st.filter));
  const int L = st.log2n;
  // usable levels drop the finest and the coarsest
  const int lo1 = 2, hi1 = st.J1 - 1, lo2 = 2, hi2 = st.J2 - 1;

  RatioResult res;
  std::vector<double> slopes;
  const auto rs = rays();
  for (const auto& ray : rs) {
    std::vector<std::pair<int, int>> blocks;
    const double smax = 2.0 * (L + c + 1);
    for (int step = 0; step * 0.01 <= smax; ++step) {
      const double s = step * 0.01;
      const int j1 = static_cast<int>(std::lround(-c + s * ray.a1));
      const int j2 = static_cast<int>(std::lround(-c + s * ray.a2));
      const int l1 = L - j1, l2 = L - j2;
      if (l1 < lo1 || l1 > hi1 || l2 < lo2 || l2 > hi2) continue;
      if (st.empty(l1, l2)) continue;
      if (!blocks.empty() && blocks.back() == std::make_pair(l1, l2)) continue;
      if (std::find(blocks.begin(), blocks.end(), std::make_pair(l1, l2)) != blocks.end()) continue;
      blocks.emplace_back(l1, l2);
    }
    double slope = std::numeric_limits<double>::quiet_NaN();
    if (blocks.size() >= 3) {
      std::vector<double> x, y;
      for (auto [l1, l2] : blocks) {
        x.push_back(0.5 * ((L - l1) + (L - l2)) + c);
        y.push_back(st.at(l1, l2));
      }
      const double k = static_cast<double>(x.size());
      const double mx = std::accumulate(x.begin(), x.end(), 0.0) / k;
      const double my = std::accumulate(y.begin(), y.end(), 0.0) / k;
      double sxx = 0, sxy = 0;
      for (size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
      }
      if (sxx > 0) slope = sxy / sxx;
    }
    slopes.push_back(slope);
    res.scan.push_back({ray.ratio, std::isnan(slope) ? slope : -slope});
  }

  double best = -std::numeric_limits<double>::infinity();
  for (double s : slopes)
    if (!std::isnan(s)) best = std::max(best, s);
  if (std::isinf(best)) throw NumericalError("every ray has fewer than 3 usable blocks");
  if (std::count_if(slopes.begin(), slopes.end(), [](double s) { return !std::isnan(s); }) < 3)
    throw NumericalError("fewer than 3 usable rays");
  std::vector<size_t> ties;
  for (size_t i = 0; i < slopes.size(); ++i)
    if (!std::isnan(slopes[i]) && slopes[i] >= best - 1e-12) ties.push_back(i);
  // middle of the tied set, so mirrored tables give reciprocal answers
  const size_t t = ties.size();
  if (t % 2) {
    res.best_ratio = rs[ties[t / 2]].ratio;
    res.slope_at_best = slopes[ties[t / 2]];
  } else {
    res.best_ratio = std::sqrt(rs[ties[t / 2 - 1]].ratio * rs[ties[t / 2]].ratio);
    res.slope_at_best = 0.5 * (slopes[ties[t / 2 - 1]] + slopes[ties[t / 2]]);
  }
  res.implied_alpha0 = 2 * res.best_ratio / (1 + res.best_ratio);
  return res;
}

}  // namespace anisotex
