#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "diraclab/errors.hpp"

namespace diraclab {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using Mat2 = Eigen::Matrix2cd;
using cplx = std::complex<double>;

enum class SpinStructure { Periodic, Antiperiodic };

// Equispaced Fourier grid on the circle of circumference L, plus the time
// window the experiment is allowed to touch. Spinor vectors are stored
// component-major: index(comp, j) = comp*M + j.
struct GridSpec {
  double L = 2.0 * M_PI;
  int M = 64;
  double t_max = 640.0;
  SpinStructure spin = SpinStructure::Periodic;

  void validate() const {
    if (M <= 0 || M % 2 != 0) throw ConfigError("grid.points must be a positive even integer");
    if (L <= 0) throw ConfigError("grid.circumference must be positive");
    if (t_max <= 0) throw ConfigError("grid.t_max must be positive");
  }

  double node(int j) const { return L * static_cast<double>(j) / M; }

  RVec nodes() const {
    RVec x(M);
    for (int j = 0; j < M; ++j) x[j] = node(j);
    return x;
  }

  // FFT-ordered wavenumbers 2*pi/L * {0,1,...,M/2-1,-M/2,...,-1}. The
  // antiperiodic spin structure shifts every mode by pi/L (half-integers),
  // which in particular removes the k = 0 mode.
  RVec wavenumbers() const {
    RVec k(M);
    const double base = 2.0 * M_PI / L;
    for (int j = 0; j < M; ++j) {
      const int n = (j < M / 2) ? j : j - M;
      k[j] = base * n;
    }
    if (spin == SpinStructure::Antiperiodic) k.array() += M_PI / L;
    return k;
  }

  // Signed mode index of FFT slot j (Nyquist reported as -M/2).
  int mode_index(int j) const { return (j < M / 2) ? j : j - M; }
};

// Dense unitary transform to the Fourier basis adapted to the spin
// structure, and the spectral derivative built from it. M <= 512 keeps the
// dense route comfortably fast and exact.
struct Fourier {
  explicit Fourier(const GridSpec& grid);

  const GridSpec grid;
  RVec k;          // FFT-ordered physical wavenumbers (incl. twist)
  Mat analysis;    // coefficients = analysis * samples; unitary
  Mat derivative;  // d/dx on samples, exactly anti-Hermitian

  // Conjugate a 2M x 2M component-major operator into the Fourier basis.
  Mat to_fourier(const Mat& A) const;
  // 2x2 spinor block of a Fourier-space operator at FFT slot j (diagonal in k).
  Mat2 spinor_block(const Mat& A_fourier, int j) const;
};

}  // namespace diraclab
