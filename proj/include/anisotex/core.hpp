#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace anisotex {

using Vec2 = std::array<double, 2>;

// row-major 2x2
struct Mat2 {
  double a11 = 1, a12 = 0, a21 = 0, a22 = 1;

  Vec2 operator*(const Vec2& v) const { return {a11 * v[0] + a12 * v[1], a21 * v[0] + a22 * v[1]}; }
  Mat2 operator*(const Mat2& o) const {
    return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
            a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
  }
  Mat2 transpose() const { return {a11, a21, a12, a22}; }
  double det() const { return a11 * a22 - a12 * a21; }
};

// Bad user input: out-of-domain parameters, infeasible levels, malformed files.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Numerical trouble: non-convergence, degenerate regressions.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Anisotropy;

struct AnisotropyCheck {
  std::vector<std::string> errors;
  bool ok() const { return errors.empty(); }
  Anisotropy value() const;  // throws DomainError listing errors

 private:
  friend AnisotropyCheck validate_anisotropy(double, double, Vec2, Vec2);
  double l1_ = 1, l2_ = 1;
  Vec2 e1_{1, 0}, e2_{0, 1};
};

AnisotropyCheck validate_anisotropy(double lambda1, double lambda2, Vec2 e1, Vec2 e2);

// Trace-2 anisotropy held as its eigendecomposition, eigenvalues ascending.
class Anisotropy {
 public:
  Anisotropy() = default;  // identity

  double lambda1() const { return l1_; }
  double lambda2() const { return l2_; }
  const Vec2& e1() const { return e1_; }
  const Vec2& e2() const { return e2_; }

  // diag(alpha, 2 - alpha) in the canonical axes
  static Anisotropy diagonal(double alpha);
  // any positive diagonalizable matrix, rescaled to trace 2
  static Anisotropy normalized(double mu1, double mu2, Vec2 e1, Vec2 e2);

  bool is_diagonal() const;
  // eigenvalue attached to the coordinate axis `axis` (diagonal anisotropies only)
  double axis_eigenvalue(int axis) const;
  Mat2 matrix() const;

 private:
  friend class AnisotropyCheck;
  friend AnisotropyCheck validate_anisotropy(double, double, Vec2, Vec2);
  double l1_ = 1, l2_ = 1;
  Vec2 e1_{1, 0}, e2_{0, 1};
};

Mat2 matrix_power(const Anisotropy& d, double a);

struct FieldSpec {
  Anisotropy anisotropy;
  double hurst = 0.5;
  std::string rho = "power_sum";
  int grid_n = 256;
  std::uint64_t seed = 0;
  // synthesis discretization: torus side in units of the sampled window,
  // and how many alias images are summed exactly per axis
  int padding = 4;
  int alias_terms = 2;

  double alpha0() const { return anisotropy.axis_eigenvalue(0); }
};

FieldSpec make_field_spec(double alpha0, double hurst, int n, std::uint64_t seed);
// all violated invariants; empty when the spec is admissible
std::vector<std::string> field_spec_errors(const FieldSpec& s);
void require_valid(const FieldSpec& s);

struct SampledField {
  int n = 0;
  std::vector<double> values;  // row-major, values[i*n+j] at x = (i/n, j/n)
  FieldSpec spec;

  double spacing() const { return 1.0 / n; }
  double operator()(int i, int j) const { return values[static_cast<size_t>(i) * n + j]; }
  double& operator()(int i, int j) { return values[static_cast<size_t>(i) * n + j]; }
};

bool is_power_of_two(long v);

}  // namespace anisotex
