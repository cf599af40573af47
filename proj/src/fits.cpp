#include "diraclab/fits.hpp"

#include <cmath>

namespace diraclab {

PowerFit fit_power_law(const std::vector<double>& t, const std::vector<double>& y,
                       double floor) {
  PowerFit fit;
  double ymax = 0.0;
  for (double v : y) ymax = std::max(ymax, v);
  if (ymax <= floor) {
    fit.exact = true;
    fit.slope = -std::numeric_limits<double>::infinity();
    fit.n = static_cast<int>(y.size());
    return fit;
  }

  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < t.size() && i < y.size(); ++i) {
    if (y[i] > floor && t[i] > 0) {
      lx.push_back(std::log(t[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  const int n = static_cast<int>(lx.size());
  fit.n = n;
  if (n < 2) return fit;

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double denom = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - fit.slope * sx) / n;

  double ss_res = 0, ss_tot = 0;
  const double ymean = sy / n;
  for (int i = 0; i < n; ++i) {
    const double r = ly[i] - (intercept + fit.slope * lx[i]);
    ss_res += r * r;
    ss_tot += (ly[i] - ymean) * (ly[i] - ymean);
  }
  fit.r2 = (ss_tot > 0) ? 1.0 - ss_res / ss_tot : 1.0;
  if (n > 2) {
    const double se = std::sqrt(ss_res / (n - 2) * n / denom);
    fit.stderr95 = 1.96 * se;
  }
  return fit;
}

AnnulusReport annulus_block_slopes(const Mat& A, const Fourier& fourier, int n_min,
                                   int n_max) {
  const GridSpec& grid = fourier.grid;
  if (n_max < 0) n_max = grid.M / 4;
  if (n_min >= n_max) n_min = std::max(2, n_max / 4);  // coarse grids
  const Mat Af = fourier.to_fourier(A);

  AnnulusReport report;
  for (int lo = n_min; lo < n_max; lo *= 2) {
    const int hi = std::min(2 * lo, n_max);
    std::vector<int> slots;
    for (int j = 0; j < grid.M; ++j) {
      const int n = std::abs(grid.mode_index(j));
      if (n >= lo && n < hi) slots.push_back(j);
    }
    if (slots.empty()) break;
    // diagonal annulus block over both spinor components
    Mat blk(2 * slots.size(), 2 * slots.size());
    for (std::size_t r = 0; r < slots.size(); ++r)
      for (std::size_t c = 0; c < slots.size(); ++c)
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            blk(a * slots.size() + r, b * slots.size() + c) =
                Af(a * grid.M + slots[r], b * grid.M + slots[c]);
    report.centers.push_back(std::sqrt(static_cast<double>(lo) * hi));
    report.norms.push_back(blk.operatorNorm());
    if (hi == n_max) break;
  }
  report.fit = fit_power_law(report.centers, report.norms);
  return report;
}

}  // namespace diraclab
