#include "anisotex/homog.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "quadrature.hpp"

namespace anisotex {

std::string rho_kind_name(RhoKind k) {
  switch (k) {
    case RhoKind::power_sum:
      return "power_sum";
  }
  return "?";
}

RhoKind rho_kind_from_name(const std::string& name) {
  if (name == "power_sum") return RhoKind::power_sum;
  throw DomainError("unknown rho kind '" + name + "'");
}

HomogeneousFunction::HomogeneousFunction(RhoKind kind, Anisotropy tag, std::vector<double> params)
    : kind_(kind), tag_(tag), params_(std::move(params)) {
  if (kind_ == RhoKind::power_sum) {
    if (params_.size() != 1) throw DomainError("power_sum takes exactly one parameter (alpha0)");
    const double a0 = params_[0];
    if (!(a0 > 0 && a0 < 2)) throw DomainError("power_sum needs 0 < alpha0 < 2");
    p1_ = 1.0 / a0;
    p2_ = 1.0 / (2.0 - a0);
  }
}

double HomogeneousFunction::operator()(const Vec2& xi) const {
  // kind_ == power_sum is the only registered kind
  const double a = std::abs(xi[0]), b = std::abs(xi[1]);
  return (a == 0 ? 0.0 : std::pow(a, p1_)) + (b == 0 ? 0.0 : std::pow(b, p2_));
}

HomogeneousFunction rho_power_sum(double alpha0) {
  if (!(alpha0 > 0 && alpha0 < 2)) throw DomainError("power_sum needs 0 < alpha0 < 2");
  return HomogeneousFunction(RhoKind::power_sum, Anisotropy::diagonal(alpha0), {alpha0});
}

HomogeneousFunction rho_for(const FieldSpec& spec) {
  rho_kind_from_name(spec.rho);
  return rho_power_sum(spec.alpha0());
}

double evaluate(const HomogeneousFunction& rho, const Vec2& xi) { return rho(xi); }

double homogeneity_error(const HomogeneousFunction& rho, double a, const Vec2& xi) {
  const Vec2 axi = matrix_power(rho.anisotropy(), a).transpose() * xi;
  const double lhs = rho(axi), rhs = a * rho(xi);
  return std::abs(lhs - rhs) / rhs;
}

HomogeneityReport check_homogeneity(const HomogeneousFunction& rho, int trials, std::uint64_t seed) {
  if (trials < 1) throw DomainError("trials must be >= 1");
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> loga(std::log(0.01), std::log(100.0));
  std::uniform_real_distribution<double> ang(0.0, 2 * std::numbers::pi);
  HomogeneityReport r;
  r.trials = trials;
  for (int t = 0; t < trials; ++t) {
    const double a = std::exp(loga(gen)), phi = ang(gen);
    r.max_relative_error =
        std::max(r.max_relative_error, homogeneity_error(rho, a, {std::cos(phi), std::sin(phi)}));
  }
  return r;
}

IntegrabilityReport check_integrability(const HomogeneousFunction& rho, double hurst) {
  if (!(hurst > 0)) throw DomainError("hurst must be positive");
  const detail::PolarFrame frame(rho.anisotropy());
  const auto angles = detail::half_circle_nodes();
  const double g = 2.0 * (hurst + 1.0);

  // shells [2^k, 2^{k+1}] in the anisotropic radius, out to 10^4
  constexpr int k_in = -40, k_out = 14;
  IntegrabilityReport rep;
  for (int k = k_in; k < k_out; ++k) {
    const double r0 = std::ldexp(1.0, k), r1 = 2 * r0;
    double shell = 0;
    for (const auto& an : angles) {
      const Vec2 th{std::cos(an.x), std::sin(an.x)};
      const double jac = frame.jac(an.x);
      // integrate in log r so each shell is one smooth panel
      shell += 2 * an.w * jac * detail::gauss_integrate<20>(std::log(r0), std::log(r1), [&](double lr) {
                 const double r = std::exp(lr);
                 const Vec2 xi = frame.point(r, th);
                 const double n2 = xi[0] * xi[0] + xi[1] * xi[1];
                 return std::min(1.0, n2) * std::pow(rho(xi), -g) * r * r;
               });
    }
    rep.shells.push_back(shell);
  }

  const auto& s = rep.shells;
  const size_t ns = s.size();
  constexpr int last = 5;
  double qin = 0, qout = 0;
  bool ok = true;
  for (int i = 0; i < last; ++i) {
    // inward: shell i relative to shell i+1; outward: shell ns-1-i relative to ns-2-i
    const double a = s[i] / s[i + 1], b = s[ns - 1 - i] / s[ns - 2 - i];
    if (!std::isfinite(a) || !std::isfinite(b)) ok = false;
    qin = std::max(qin, a);
    qout = std::max(qout, b);
  }
  rep.inner_ratio = qin;
  rep.outer_ratio = qout;
  // exact homogeneity makes far shells geometric: finite iff the ratio is below 1
  constexpr double q_max = 1 - 1e-3;
  rep.finite = ok && qin < q_max && qout < q_max;
  double sum = 0;
  for (double v : s) sum += v;
  if (rep.finite) {
    // geometric tails beyond the first and last shells
    sum += s.front() * qin / (1 - qin) + s.back() * qout / (1 - qout);
    rep.estimate = sum;
  } else {
    rep.estimate = std::numeric_limits<double>::infinity();
  }
  return rep;
}

namespace {

std::vector<double> tail_nodes(double p, double gamma, double lo, double hi, int count) {
  const double a = gamma - 1.0 / p, b = 1.0 / p;
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) {
    const double z = std::exp(lo + (hi - lo) * i / (count - 1));
    // int_z^inf (1+s^p)^-gamma ds = (1/p) B_x(gamma - 1/p, 1/p), x = 1/(1+z^p)
    const double x = 1.0 / (1.0 + std::pow(z, p));
    const double v = boost::math::beta(a, b, x) / p;
    out[i] = std::log(v);
  }
  return out;
}

constexpr double kTailLo = -20, kTailHi = 20;
constexpr int kTailCount = 4001;

}  // namespace

PowerTail::PowerTail(double p, double gamma)
    : p_(p),
      gamma_(gamma),
      g0_(boost::math::beta(gamma - 1.0 / p, 1.0 / p) / p),
      lo_(kTailLo),
      hi_(kTailHi),
      spline_([&] {
        auto v = tail_nodes(p, gamma, kTailLo, kTailHi, kTailCount);
        return boost::math::interpolators::cardinal_cubic_b_spline<double>(
            v.begin(), v.end(), kTailLo, (kTailHi - kTailLo) / (kTailCount - 1));
      }()) {
  if (!(p * gamma > 1)) throw DomainError("tail integral diverges (p*gamma <= 1)");
}

double PowerTail::G(double z) const {
  if (z <= 0) return g0_;
  const double lz = std::log(z);
  if (lz < lo_) return g0_ - z;
  if (lz > hi_) {
    const double pg = p_ * gamma_;
    const double zp = std::pow(z, -p_);
    return std::pow(z, 1 - pg) / (pg - 1) - gamma_ * std::pow(z, 1 - pg) * zp / (pg + p_ - 1);
  }
  return std::exp(spline_(lz));
}

double PowerTail::I(double a, double Y) const {
  if (a <= 0) return std::pow(Y, 1 - p_ * gamma_) / (p_ * gamma_ - 1);
  const double s = std::pow(a, -1.0 / p_);
  return std::pow(a, 1.0 / p_ - gamma_) * G(Y * s);
}

AliasedPowerSum::AliasedPowerSum(const HomogeneousFunction& rho, double gamma, double period,
                                 int near_terms)
    : p1_(rho.p1()),
      p2_(rho.p2()),
      gamma_(gamma),
      period_(period),
      near_(near_terms),
      y0_(period * (near_terms + 0.5)),
      corner_(0),
      tail1_(rho.p1(), gamma),
      tail2_(rho.p2(), gamma) {
  if (rho.kind() != RhoKind::power_sum) throw DomainError("aliased density needs a power_sum rho");
  // (4/P^2) int_{Y0}^inf I2(u^p1, Y0) du with u = Y0 e^t
  double c = 0;
  for (int k = 0; k < 40; ++k)
    c += detail::gauss_integrate<20>(k * 1.0, (k + 1) * 1.0, [&](double t) {
      const double u = y0_ * std::exp(t);
      return u * tail2_.I(std::pow(u, p1_), y0_);
    });
  corner_ = 4.0 * c / (period_ * period_);
}

double AliasedPowerSum::operator()(double xi1, double xi2) const {
  return table({xi1}, {xi2})[0];
}

std::vector<double> AliasedPowerSum::table(const std::vector<double>& u1,
                                           const std::vector<double>& u2) const {
  const int M = near_, w = 2 * M + 1;
  const double P = period_, g = gamma_;
  const size_t n1 = u1.size(), n2 = u2.size();

  // per-coordinate powers of the near images, and the prefactors turning
  // the other axis' tail into G evaluations
  struct Near {
    double pw;     // |u + P m|^p
    double coef;   // pw^{1/q - g} for the opposite exponent q
    double scale;  // pw^{-1/q}
  };
  auto prep = [&](const std::vector<double>& u, double p, double q) {
    std::vector<Near> out(u.size() * w);
    for (size_t i = 0; i < u.size(); ++i)
      for (int m = -M; m <= M; ++m) {
        Near& e = out[i * w + (m + M)];
        const double v = std::abs(u[i] + P * m);
        e.pw = v == 0 ? 0.0 : std::pow(v, p);
        if (e.pw > 0) {
          e.coef = std::pow(e.pw, 1.0 / q - g);
          e.scale = std::pow(e.pw, -1.0 / q);
        } else {
          e.coef = e.scale = 0;
        }
      }
    return out;
  };
  const auto a1 = prep(u1, p1_, p2_);
  const auto b2 = prep(u2, p2_, p1_);

  auto tail = [](const PowerTail& t, const Near& e, double Y) {
    return e.pw > 0 ? e.coef * t.G(Y * e.scale) : t.I(0.0, Y);
  };

  std::vector<double> out(n1 * n2);
  for (size_t i = 0; i < n1; ++i) {
    const Near* ai = &a1[i * w];
    for (size_t j = 0; j < n2; ++j) {
      const Near* bj = &b2[j * w];
      double s = 0;
      for (int m1 = 0; m1 < w; ++m1)
        for (int m2 = 0; m2 < w; ++m2) {
          const double r = ai[m1].pw + bj[m2].pw;
          if (r > 0) s += std::pow(r, -g);
        }
      double t = 0;
      const double yp2 = y0_ + std::abs(u2[j]), ym2 = y0_ - std::abs(u2[j]);
      const double yp1 = y0_ + std::abs(u1[i]), ym1 = y0_ - std::abs(u1[i]);
      for (int m = 0; m < w; ++m) {
        t += tail(tail2_, ai[m], yp2) + tail(tail2_, ai[m], ym2);
        t += tail(tail1_, bj[m], yp1) + tail(tail1_, bj[m], ym1);
      }
      out[i * n2 + j] = s + t / P + corner_;
    }
  }
  return out;
}

}  // namespace anisotex
