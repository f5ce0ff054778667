#pragma once

#include <string>
#include <vector>

#include "anisotex/core.hpp"

namespace anisotex {

enum class WaveletFilter { haar, d4 };

std::string filter_name(WaveletFilter f);
WaveletFilter filter_from_name(const std::string& name);  // throws DomainError

// Low-pass taps of the orthonormal filter.
const std::vector<double>& lowpass_taps(WaveletFilter f);

// Peak frequency of the level-l wavelet, in cycles per 2^l samples (large l).
double center_frequency(WaveletFilter f);

// Separable periodic transform with independent depths: axis 0 (index i,
// coordinate x1) to depth J1 and axis 1 (index j, x2) to depth J2. Along each
// axis the coefficients sit in Mallat order: approximation in [0, n>>J),
// level l details in [n>>l, n>>(l-1)), l = 1 the finest.
struct HyperbolicPyramid {
  int n = 0;
  int J1 = 0, J2 = 0;
  WaveletFilter filter = WaveletFilter::haar;
  std::vector<double> coeffs;  // n x n, row-major

  size_t block_size(int l1, int l2) const;
  std::vector<double> block(int l1, int l2) const;
};

HyperbolicPyramid hyperbolic_transform(const SampledField& field, WaveletFilter filter, int J1, int J2);
std::vector<double> inverse_transform(const HyperbolicPyramid& pyr);  // n x n values

struct ScaleStatistics {
  int log2n = 0;
  int J1 = 0, J2 = 0;
  double p = 2;
  WaveletFilter filter = WaveletFilter::haar;
  std::vector<double> log2_stat;  // J1 x J2, entry (l1-1)*J2 + (l2-1); -inf when empty
  std::vector<double> counts;     // coefficients pooled into each entry

  double at(int l1, int l2) const { return log2_stat[static_cast<size_t>(l1 - 1) * J2 + (l2 - 1)]; }
  bool empty(int l1, int l2) const;
};

// log2 of (mean |d|^p)^{1/p} per block (max |d| for p = inf)
ScaleStatistics scale_statistics(const HyperbolicPyramid& pyr, double p);
// pooled over realizations: moments are averaged before the log
ScaleStatistics scale_statistics(const std::vector<HyperbolicPyramid>& pyrs, double p);

ScaleStatistics transpose(const ScaleStatistics& s);

struct RatioScanRow {
  double ratio;
  double decay_rate;  // NaN when the ray was skipped
};

struct RatioResult {
  double best_ratio = 0;
  double slope_at_best = 0;
  double implied_alpha0 = 0;
  std::vector<RatioScanRow> scan;
};

// Log-spaced ratios r = 6.5^{k/80}, k = -80..80.
std::vector<double> ratio_grid();

// Rays j = -c + s (alpha, 2 - alpha), alpha = 2r/(1+r), through frequency-index
// coordinates j_i = log2 n - l_i anchored at c = log2(2 pi f_c). For each ray
// the blocks nearest to it (levels 2..J-1) are regressed against the mean
// log-frequency (j1 + j2)/2 + c; the best ratio has the slowest decay.
RatioResult ratio_maximize(const ScaleStatistics& stats);

}  // namespace anisotex
