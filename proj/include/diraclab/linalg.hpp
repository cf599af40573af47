#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

#include "diraclab/grid.hpp"

namespace diraclab {

// Adjoint with respect to the Hermitian positive form G: A* = G^{-1} A^dag G.
Mat gram_adjoint(const Mat& A, const Mat& G);

// || G A - A^dag G || / max(||G A||, eps): zero iff A is G-selfadjoint.
double gram_selfadjoint_residual(const Mat& A, const Mat& G);

// || U^dag G U - G || / ||G||: zero iff U is G-unitary.
double gram_unitarity_residual(const Mat& U, const Mat& G);

Mat gram_unitary_inverse(const Mat& U, const Mat& G);

// Operator norm in the G-inner-product, estimated by power iteration on
// G^{-1} A^dag G A. Deterministic for a fixed seed.
double gram_operator_norm(const Mat& A, const Mat& G, int iterations = 20,
                          std::uint64_t seed = 0x5eed);

double gram_vector_norm(const Vec& f, const Mat& G);

// Frobenius-style quick norm used for residual reporting.
inline double frob(const Mat& A) { return A.norm(); }

Vec random_spinor(int dim, std::mt19937_64& rng);

}  // namespace diraclab
