#pragma once
// Internal quadrature helpers shared by homog and synth.

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "anisotex/core.hpp"

namespace anisotex::detail {

struct QuadNode {
  double x, w;
};

// N-point Gauss-Legendre on [a,b], appended to out.
template <unsigned N>
void gauss_panel(double a, double b, std::vector<QuadNode>& out) {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& xs = G::abscissa();
  const auto& ws = G::weights();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] == 0) {
      out.push_back({c, h * ws[i]});
    } else {
      out.push_back({c - h * xs[i], h * ws[i]});
      out.push_back({c + h * xs[i], h * ws[i]});
    }
  }
}

template <unsigned N>
double gauss_integrate(double a, double b, auto&& f) {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& xs = G::abscissa();
  const auto& ws = G::weights();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] == 0)
      s += ws[i] * f(c);
    else
      s += ws[i] * (f(c - h * xs[i]) + f(c + h * xs[i]));
  }
  return s * h;
}

// Angles on [0, pi) with panels graded geometrically toward the coordinate
// axes, where power-sum functions have |t|^p kinks, and toward any extra kinks.
inline std::vector<QuadNode> half_circle_nodes(std::vector<double> kinks = {}) {
  constexpr double pi = std::numbers::pi;
  constexpr int depth = 14;  // grading ratio 4 -> smallest panel ~ width 4^-14
  std::vector<double> ends{0.0, pi / 2, pi};
  for (double k : kinks)
    if (k > 1e-9 && k < pi - 1e-9 && std::abs(k - pi / 2) > 1e-9) ends.push_back(k);
  std::sort(ends.begin(), ends.end());
  std::vector<QuadNode> nodes;
  for (size_t i = 0; i + 1 < ends.size(); ++i) {
    const double a = ends[i], b = ends[i + 1], half = 0.5 * (b - a);
    std::vector<double> bp{a};
    for (int k = depth; k >= 0; --k) bp.push_back(a + half * std::pow(4.0, -k));
    for (int k = 1; k <= depth; ++k) bp.push_back(b - half * std::pow(4.0, -k));
    bp.push_back(b);
    for (size_t j = 0; j + 1 < bp.size(); ++j) gauss_panel<20>(bp[j], bp[j + 1], nodes);
  }
  return nodes;
}

// Anisotropic polar map xi = r^{E^T} theta(phi): for r^{E^T} with eigen-split
// E^T = sum mu_i u_i w_i^T the point is sum r^{mu_i} (w_i . theta) u_i.
struct PolarFrame {
  double mu1, mu2;
  Vec2 u1, u2;  // eigenvectors of E^T
  Vec2 w1, w2;  // dual basis (rows of the inverse eigenvector matrix)

  explicit PolarFrame(const Anisotropy& e) {
    // E = P diag P^-1 so E^T = P^-T diag P^T: eigenvectors of E^T are the
    // columns of P^-T and the dual rows are the columns of P.
    const Vec2 &e1 = e.e1(), &e2 = e.e2();
    const double det = e1[0] * e2[1] - e2[0] * e1[1];
    // P^-1 rows
    const Vec2 r1{e2[1] / det, -e2[0] / det}, r2{-e1[1] / det, e1[0] / det};
    mu1 = e.lambda1();
    mu2 = e.lambda2();
    u1 = r1;  // columns of P^-T are rows of P^-1
    u2 = r2;
    w1 = e1;
    w2 = e2;
  }

  // coefficients of theta on u1,u2
  std::pair<double, double> split(const Vec2& th) const {
    return {w1[0] * th[0] + w1[1] * th[1], w2[0] * th[0] + w2[1] * th[1]};
  }
  Vec2 point(double r, const Vec2& th) const {
    auto [c1, c2] = split(th);
    const double s1 = std::pow(r, mu1) * c1, s2 = std::pow(r, mu2) * c2;
    return {s1 * u1[0] + s2 * u2[0], s1 * u1[1] + s2 * u2[1]};
  }
  // d xi = r * jac(phi) dr dphi
  double jac(double phi) const {
    const Vec2 th{std::cos(phi), std::sin(phi)}, dth{-std::sin(phi), std::cos(phi)};
    auto [c1, c2] = split(th);
    const Vec2 et{mu1 * c1 * u1[0] + mu2 * c2 * u2[0], mu1 * c1 * u1[1] + mu2 * c2 * u2[1]};
    return std::abs(et[0] * dth[1] - et[1] * dth[0]);
  }
};

}  // namespace anisotex::detail
