#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "anisotex/core.hpp"

namespace anisotex {

inline constexpr double kSupOrder = std::numeric_limits<double>::infinity();

// Increments along a direction with zero variance at every lag.
class DegenerateDirection : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

struct LatticeStep {
  int u = 1, v = 0;
  double length() const;
};

// Closest primitive lattice direction (u,v) with |u|,|v| <= 8.
LatticeStep snap_direction(const Vec2& direction);

struct StructureFunction {
  Vec2 direction{1, 0};  // unit vector of the lattice step
  LatticeStep step;
  double p = 2;
  int n = 0;                  // grid size of the source field
  std::vector<int> multiples;  // lag = multiple * |step| / n
  std::vector<double> lags;
  std::vector<double> values;
};

// Half-octave multiples round(2^{k/2}), deduplicated, with lag <= 1/4.
std::vector<int> default_lag_multiples(int n, LatticeStep step);

// Mean over interior x (1/8 margin) of |f(x + t e) - f(x)|^p; max for p = inf.
// Requested lags are rounded to the nearest lattice multiple.
StructureFunction structure_function(const SampledField& field, const Vec2& direction, double p,
                                     const std::vector<double>& lags = {});

struct FitRange {
  double t_min = 0, t_max = 0;
};
FitRange default_fit_range(int n);  // [4/n, 1/16]

struct DirectionalExponent {
  double h = 0;
  double std_error = 0;  // regression standard error of h
  FitRange fit_range;
  int lag_count = 0;
};

DirectionalExponent directional_exponent(const StructureFunction& sf,
                                         std::optional<FitRange> range = std::nullopt);

// min(lambda1 h1, lambda2 h2) with h_i measured along the eigenvectors of D
double critical_exponent(const SampledField& field, const Anisotropy& d, double p);

double tent_prediction(double alpha, double alpha0, double hurst);

struct ExponentScan {
  std::vector<double> alphas;
  std::vector<double> exponents;  // mean over realizations
  std::vector<double> stderrs;    // standard error of that mean
  double argmax_alpha = 0;
  double peak = 0;
};

ExponentScan scan_anisotropy(const std::vector<SampledField>& fields,
                             const std::vector<double>& alpha_grid, double p);

// Directional exponents of each field along the two coordinate axes.
struct AxisExponents {
  std::vector<double> h1, h2;
};
AxisExponents axis_exponents(const std::vector<SampledField>& fields, double p);

}  // namespace anisotex
