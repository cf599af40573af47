#include "diraclab/grid.hpp"

namespace diraclab {

Fourier::Fourier(const GridSpec& g) : grid(g) {
  grid.validate();
  const int M = grid.M;
  k = grid.wavenumbers();

  // Unitary DFT combined with the spin-structure twist: basis functions are
  // exp(i k_n x) with k_n the (possibly half-integer) wavenumbers, so
  // analysis = F * diag(conj(twist)) with F the plain unitary DFT.
  analysis.resize(M, M);
  const double norm = 1.0 / std::sqrt(static_cast<double>(M));
  for (int n = 0; n < M; ++n) {
    for (int j = 0; j < M; ++j) {
      const double phase = -k[n] * grid.node(j);
      analysis(n, j) = norm * std::exp(cplx(0.0, phase));
    }
  }

  Mat synthesis = analysis.adjoint();
  Mat ik = Mat::Zero(M, M);
  for (int n = 0; n < M; ++n) ik(n, n) = cplx(0.0, k[n]);
  derivative = synthesis * ik * analysis;
}

Mat Fourier::to_fourier(const Mat& A) const {
  const int M = grid.M;
  Mat out(2 * M, 2 * M);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      out.block(a * M, b * M, M, M) =
          analysis * A.block(a * M, b * M, M, M) * analysis.adjoint();
  return out;
}

Mat2 Fourier::spinor_block(const Mat& A_fourier, int j) const {
  const int M = grid.M;
  Mat2 blk;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) blk(a, b) = A_fourier(a * M + j, b * M + j);
  return blk;
}

}  // namespace diraclab
