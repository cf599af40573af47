#include "diraclab/linalg.hpp"

#include <Eigen/Cholesky>

namespace diraclab {

Mat gram_adjoint(const Mat& A, const Mat& G) {
  return G.llt().solve(A.adjoint() * G);
}

double gram_selfadjoint_residual(const Mat& A, const Mat& G) {
  const Mat GA = G * A;
  const double scale = std::max(GA.norm(), 1e-300);
  return (GA - A.adjoint() * G).norm() / scale;
}

double gram_unitarity_residual(const Mat& U, const Mat& G) {
  return (U.adjoint() * G * U - G).norm() / G.norm();
}

Mat gram_unitary_inverse(const Mat& U, const Mat& G) {
  return G.llt().solve(U.adjoint() * G);
}

Vec random_spinor(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec f(dim);
  for (int i = 0; i < dim; ++i) f[i] = cplx(gauss(rng), gauss(rng));
  return f;
}

double gram_operator_norm(const Mat& A, const Mat& G, int iterations, std::uint64_t seed) {
  if (A.size() == 0) return 0.0;
  std::mt19937_64 rng(seed);
  Vec v = random_spinor(static_cast<int>(A.rows()), rng);
  v /= v.norm();
  auto llt = G.llt();
  double norm2 = 0.0;
  for (int it = 0; it < iterations; ++it) {
    // power iteration on G^{-1} A^dag G A (the G-normal operator of A)
    Vec w = A * v;
    w = G * w;
    w = A.adjoint() * w;
    w = llt.solve(w);
    norm2 = std::abs((v.dot(G * w)).real()) / std::abs((v.dot(G * v)).real());
    const double n = w.norm();
    if (n < 1e-290) return 0.0;
    v = w / n;
  }
  return std::sqrt(norm2);
}

double gram_vector_norm(const Vec& f, const Mat& G) {
  return std::sqrt(std::abs((f.dot(G * f)).real()));
}

}  // namespace diraclab
