#include "anisotex/core.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace anisotex {

namespace {

double norm(const Vec2& v) { return std::hypot(v[0], v[1]); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += "; ";
    out += parts[i];
  }
  return out;
}

}  // namespace

AnisotropyCheck validate_anisotropy(double lambda1, double lambda2, Vec2 e1, Vec2 e2) {
  AnisotropyCheck c;
  if (!std::isfinite(lambda1) || !std::isfinite(lambda2)) {
    c.errors.push_back("eigenvalues must be finite");
  } else {
    if (std::abs(lambda1 + lambda2 - 2.0) > 1e-12)
      c.errors.push_back("trace = " + fmt(lambda1 + lambda2) + " != 2");
    if (lambda1 <= 0) c.errors.push_back("lambda1 = " + fmt(lambda1) + " is not positive");
    if (lambda2 <= 0) c.errors.push_back("lambda2 = " + fmt(lambda2) + " is not positive");
  }
  if (std::abs(norm(e1) - 1.0) > 1e-12) c.errors.push_back("|e1| = " + fmt(norm(e1)) + " != 1");
  if (std::abs(norm(e2) - 1.0) > 1e-12) c.errors.push_back("|e2| = " + fmt(norm(e2)) + " != 1");
  if (std::abs(e1[0] * e2[1] - e1[1] * e2[0]) <= 1e-9)
    c.errors.push_back("eigenvectors are collinear");
  if (c.ok()) {
    if (lambda2 < lambda1) {
      std::swap(lambda1, lambda2);
      std::swap(e1, e2);
    }
    c.l1_ = lambda1;
    c.l2_ = lambda2;
    c.e1_ = e1;
    c.e2_ = e2;
  }
  return c;
}

Anisotropy AnisotropyCheck::value() const {
  if (!ok()) throw DomainError("invalid anisotropy: " + join(errors));
  Anisotropy a;
  a.l1_ = l1_;
  a.l2_ = l2_;
  a.e1_ = e1_;
  a.e2_ = e2_;
  return a;
}

Anisotropy Anisotropy::diagonal(double alpha) {
  return validate_anisotropy(alpha, 2.0 - alpha, {1, 0}, {0, 1}).value();
}

Anisotropy Anisotropy::normalized(double mu1, double mu2, Vec2 e1, Vec2 e2) {
  if (!(mu1 > 0) || !(mu2 > 0) || !std::isfinite(mu1 + mu2))
    throw DomainError("eigenvalues must be positive and finite");
  const double s = 2.0 / (mu1 + mu2);
  double l1 = mu1 * s;
  const double l2 = 2.0 - l1;  // keep the trace exact
  const double n1 = norm(e1), n2 = norm(e2);
  if (n1 == 0 || n2 == 0) throw DomainError("zero eigenvector");
  return validate_anisotropy(l1, l2, {e1[0] / n1, e1[1] / n1}, {e2[0] / n2, e2[1] / n2}).value();
}

bool Anisotropy::is_diagonal() const {
  return (e1_[1] == 0 && e2_[0] == 0) || (e1_[0] == 0 && e2_[1] == 0);
}

double Anisotropy::axis_eigenvalue(int axis) const {
  if (!is_diagonal()) throw DomainError("anisotropy is not diagonal");
  const bool e1_on_x = e1_[1] == 0;
  return (axis == 0) == e1_on_x ? l1_ : l2_;
}

Mat2 Anisotropy::matrix() const {
  const Mat2 p{e1_[0], e2_[0], e1_[1], e2_[1]};
  const double det = p.det();
  const Mat2 pinv{p.a22 / det, -p.a12 / det, -p.a21 / det, p.a11 / det};
  return p * Mat2{l1_, 0, 0, l2_} * pinv;
}

Mat2 matrix_power(const Anisotropy& d, double a) {
  if (!(a > 0) || !std::isfinite(a)) throw DomainError("matrix_power needs a > 0, got " + fmt(a));
  const double la = std::log(a);
  const double s1 = std::exp(d.lambda1() * la), s2 = std::exp(d.lambda2() * la);
  if (d.is_diagonal()) {
    const bool e1_on_x = d.e1()[1] == 0;
    return e1_on_x ? Mat2{s1, 0, 0, s2} : Mat2{s2, 0, 0, s1};
  }
  const Vec2 &e1 = d.e1(), &e2 = d.e2();
  const Mat2 p{e1[0], e2[0], e1[1], e2[1]};
  const double det = p.det();
  const Mat2 pinv{p.a22 / det, -p.a12 / det, -p.a21 / det, p.a11 / det};
  return p * Mat2{s1, 0, 0, s2} * pinv;
}

bool is_power_of_two(long v) { return v > 0 && (v & (v - 1)) == 0; }

std::vector<std::string> field_spec_errors(const FieldSpec& s) {
  std::vector<std::string> e;
  const double lmin = s.anisotropy.lambda1();
  if (!(s.hurst > 0) || !(s.hurst < lmin)) {
    const double a0 = s.anisotropy.is_diagonal() ? s.anisotropy.axis_eigenvalue(0) : lmin;
    e.push_back("hurst = " + fmt(s.hurst) + " outside the admissible interval (0, min(" + fmt(a0) +
                "," + fmt(2.0 - a0) + ")=" + fmt(lmin) + ")");
  }
  if (!s.anisotropy.is_diagonal()) e.push_back("field anisotropy must be diagonal");
  if (s.rho != "power_sum") e.push_back("unknown rho kind '" + s.rho + "'");
  if (s.grid_n < 64 || !is_power_of_two(s.grid_n))
    e.push_back("grid_n = " + std::to_string(s.grid_n) + " must be a power of two >= 64");
  if (s.padding < 1 || s.padding > 16) e.push_back("padding must be in [1, 16]");
  if (s.alias_terms < 0 || s.alias_terms > 8) e.push_back("alias_terms must be in [0, 8]");
  return e;
}

void require_valid(const FieldSpec& s) {
  const auto e = field_spec_errors(s);
  if (!e.empty()) throw DomainError(join(e));
}

FieldSpec make_field_spec(double alpha0, double hurst, int n, std::uint64_t seed) {
  if (!(alpha0 > 0 && alpha0 < 2)) throw DomainError("alpha0 = " + fmt(alpha0) + " outside (0,2)");
  FieldSpec s;
  s.anisotropy = Anisotropy::diagonal(alpha0);
  s.hurst = hurst;
  s.grid_n = n;
  s.seed = seed;
  require_valid(s);
  return s;
}

}  // namespace anisotex
