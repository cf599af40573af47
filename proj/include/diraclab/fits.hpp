#pragma once

#include <vector>

#include "diraclab/grid.hpp"

namespace diraclab {

// Least-squares fit of log y against log t: y ~ C * t^slope. Also used with
// t = <time> or t = |k|. Exact zero data is reported with exact = true.
struct PowerFit {
  double slope = 0.0;     // fitted exponent (signed)
  double stderr95 = 0.0;  // 95% half-width on the slope
  double r2 = 1.0;
  int n = 0;
  bool exact = false;  // all samples at the rounding floor
};

PowerFit fit_power_law(const std::vector<double>& t, const std::vector<double>& y,
                       double floor = 1e-13);

// Norms of the Fourier-space diagonal sub-blocks of an operator over dyadic
// mode annuli |n| in [2^j, 2^(j+1)), n the integer mode index. The fitted
// slope of log norm vs log |n| is the matrix-level surrogate for the symbol
// order of the operator.
struct AnnulusReport {
  std::vector<double> centers;  // geometric centers of the annuli
  std::vector<double> norms;
  PowerFit fit;
};

class Fourier;  // grid.hpp

AnnulusReport annulus_block_slopes(const Mat& A, const Fourier& fourier,
                                   int n_min = 8, int n_max = -1);

}  // namespace diraclab
