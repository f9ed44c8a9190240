#pragma once

// Dense complex kernels shared by every other module. N is desk scale
// (NHDYN_MAX_DIM defaults to 64), so everything here is dense and direct.

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace nhdyn {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

inline constexpr double kDefaultTolEig = 1e-10;
inline constexpr double kDefaultRankTolRel = 1e-10;
inline constexpr std::size_t kDefaultMaxKronEntries = 100'000'000;

struct Spectrum {
  ComplexVector eigenvalues;
  ComplexMatrix right_vectors;  // unit-norm columns
  double condition_estimate = 0.0;  // 2-norm condition number of right_vectors
};

bool all_finite(const ComplexMatrix& a);
void require_finite(const ComplexMatrix& a, const char* what);
void require_square(const ComplexMatrix& a, const char* what);

ComplexMatrix identity(Eigen::Index n);

// e^A by scaling-and-squaring with a Pade approximant.
ComplexMatrix expm(const ComplexMatrix& a);

// Eigenpairs of a general complex matrix, sorted by (Re E, Im E).
// Defective input is not rejected; it shows up as a huge condition_estimate.
Spectrum eig_general(const ComplexMatrix& a, double tol_eig = kDefaultTolEig);

// Orthonormal basis (columns) of the numerical kernel of l: right singular
// vectors whose singular value is below rank_tol_rel * sigma_max.
ComplexMatrix nullspace(const ComplexMatrix& l, double rank_tol_rel = kDefaultRankTolRel);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b,
                   std::size_t max_entries = kDefaultMaxKronEntries);

// Induced 2-norm.
double op_norm(const ComplexMatrix& a);

// Column-stacking vectorization, so that vec(A X B) = (B^T kron A) vec(X).
ComplexVector vec(const ComplexMatrix& x);
ComplexMatrix unvec(const ComplexVector& v, Eigen::Index rows, Eigen::Index cols);

// Numerical rank of the columns of a, relative to the largest singular value.
Eigen::Index numerical_rank(const ComplexMatrix& a, double rank_tol_rel = kDefaultRankTolRel);

// <f, g> = sum conj(f_k) g_k
inline Complex inner(const ComplexVector& f, const ComplexVector& g) { return f.dot(g); }

}  // namespace nhdyn
