#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "anisotex/core.hpp"

namespace anisotex {

enum class RhoKind { power_sum };

std::string rho_kind_name(RhoKind k);
RhoKind rho_kind_from_name(const std::string& name);  // throws DomainError

// An E-homogeneous positive function rho. `anisotropy` is the tag the
// function claims to be homogeneous for; nothing forces the tag to be right.
class HomogeneousFunction {
 public:
  HomogeneousFunction(RhoKind kind, Anisotropy tag, std::vector<double> params);

  RhoKind kind() const { return kind_; }
  const Anisotropy& anisotropy() const { return tag_; }
  const std::vector<double>& parameters() const { return params_; }

  double operator()(const Vec2& xi) const;

  // power_sum: rho = |xi1|^p1 + |xi2|^p2
  double p1() const { return p1_; }
  double p2() const { return p2_; }

 private:
  RhoKind kind_;
  Anisotropy tag_;
  std::vector<double> params_;
  double p1_ = 1, p2_ = 1;
};

HomogeneousFunction rho_power_sum(double alpha0);
HomogeneousFunction rho_for(const FieldSpec& spec);
double evaluate(const HomogeneousFunction& rho, const Vec2& xi);

struct HomogeneityReport {
  double max_relative_error = 0;
  int trials = 0;
};

// |rho(a^{E^T} xi) - a rho(xi)| / (a rho(xi))
double homogeneity_error(const HomogeneousFunction& rho, double a, const Vec2& xi);
HomogeneityReport check_homogeneity(const HomogeneousFunction& rho, int trials,
                                    std::uint64_t seed = 0x5eed);

struct IntegrabilityReport {
  bool finite = false;
  double estimate = 0;
  double inner_ratio = 0;  // worst consecutive-shell ratio among the innermost shells
  double outer_ratio = 0;  // same, outermost shells
  std::vector<double> shells;  // dyadic shell sums, innermost first
};

// int (1 ^ |xi|^2) rho(xi)^{-2(H+1)} dxi over dyadic anisotropic shells
IntegrabilityReport check_integrability(const HomogeneousFunction& rho, double hurst);

// G(z) = int_z^inf (1 + s^p)^{-gamma} ds, tabulated once.
class PowerTail {
 public:
  PowerTail(double p, double gamma);
  double G(double z) const;
  // int_Y^inf (a + y^p)^{-gamma} dy for a >= 0, Y > 0
  double I(double a, double Y) const;

 private:
  double p_, gamma_, g0_;
  double lo_, hi_;
  boost::math::interpolators::cardinal_cubic_b_spline<double> spline_;
};

// S(xi) = sum over m in Z^2 of rho(xi + P m)^{-gamma} for a power-sum rho:
// images with |m1|,|m2| <= M summed exactly, the rest by midpoint-rule tails.
class AliasedPowerSum {
 public:
  AliasedPowerSum(const HomogeneousFunction& rho, double gamma, double period, int near_terms);

  double operator()(double xi1, double xi2) const;
  // S(u1[i], u2[j]) row-major; coordinates must lie in [-P/2, P/2]
  std::vector<double> table(const std::vector<double>& u1, const std::vector<double>& u2) const;

 private:
  double p1_, p2_, gamma_, period_;
  int near_;
  double y0_;      // P (M + 1/2)
  double corner_;  // images beyond M on both axes, treated as constant
  PowerTail tail1_, tail2_;
};

}  // namespace anisotex
