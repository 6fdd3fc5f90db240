#pragma once
#include <complex>
#include <cstddef>
#include <vector>

#include "enrnn/matrix.hpp"

namespace enrnn {

// Real Schur decomposition T = Q R Q^T with orthogonal Q and quasi-upper-
// triangular R (1x1 and 2x2 diagonal blocks; every retained 2x2 block has a
// complex conjugate eigenvalue pair — real-eigenvalue blocks are split).
struct SchurResult {
    DenseMatrix Q;
    DenseMatrix R;
};

// Hessenberg reduction by Householder reflectors followed by Francis
// double-shift QR with deflation. Throws SolverFailure if the iteration
// budget (default 30*n sweeps) is exhausted.
SchurResult real_schur(const DenseMatrix& T, std::size_t max_sweeps = 0);

// Eigenvalues read off the diagonal blocks of a quasi-triangular R.
std::vector<std::complex<double>> schur_eigenvalues(const DenseMatrix& R);

// Full spectrum of T via the Schur route.
std::vector<std::complex<double>> eigenvalues(const DenseMatrix& T);

// max |lambda| over the spectrum; 0 for an empty matrix.
double spectral_radius(const DenseMatrix& T);

// Largest singular value via power iteration on A^T A (deterministic start,
// relative tolerance 1e-10, iteration cap 10000 -> SolverFailure).
double spectral_norm(const DenseMatrix& A, double rel_tol = 1e-10,
                     std::size_t max_iters = 10000);

// Dominant eigenpair of T plus the derived quantities consumed by the
// spectral-radius normalization gradient:
//   S = conj(v) u^T / (v* u),  C = alpha*Re(S) + beta*Im(S),
//   defect_score = |v* u| / (||u|| ||v||).
// u is the right eigenvector (T u = lambda u), v the left (v* T = lambda v*).
// Canonical conjugate choice: beta >= 0. Ties among equal-modulus
// eigenvalues (relative 1e-12) break by largest real part, then positive
// imaginary part.
struct DominantEigenData {
    double rho = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    ComplexVector u;
    ComplexVector v;
    DenseMatrix S_re;
    DenseMatrix S_im;
    DenseMatrix C;
    double defect_score = 0.0;
};

DominantEigenData dominant_eigenpair(const DenseMatrix& T);

// Builds the derived (rho, S, C, defect) fields from a given eigenvalue and
// eigenvector pair; S and C are zeroed when |v*u| is numerically zero.
DominantEigenData make_eigen_data(double alpha, double beta, const ComplexVector& u,
                                  const ComplexVector& v);

}  // namespace enrnn
