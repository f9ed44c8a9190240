#pragma once

// Reference implementations used only by the tests. They deliberately avoid
// the library code paths they check: no Pade, no SVD nullspace, no kron.

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>
#include <Eigen/LU>

namespace oracle {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// exp(A) by scaling, a Taylor series summed until the term norm drops below
// 1e-17, and repeated squaring.
inline Matrix taylor_expm(const Matrix& a) {
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  double scaled = norm;
  while (scaled > 0.25) {
    scaled /= 2.0;
    ++squarings;
  }
  const Matrix b = a / std::pow(2.0, squarings);
  Matrix sum = Matrix::Identity(a.rows(), a.cols());
  Matrix term = sum;
  for (int k = 1; k < 200; ++k) {
    term = term * b / static_cast<double>(k);
    sum += term;
    if (term.norm() < 1e-17) break;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

// e^{iH^dag t} X e^{-iHt} through the Taylor oracle.
inline Matrix conjugate(const Matrix& h, const Matrix& x, double t) {
  const Complex i(0.0, 1.0);
  return taylor_expm(i * t * h.adjoint()) * x * taylor_expm(-i * t * h);
}

// Dimension of {X : H^dag X = X H} from the linear map written out entry by
// entry and ranked with full-pivot LU.
inline Eigen::Index symmetry_dimension(const Matrix& h, double threshold = 1e-9) {
  const Eigen::Index n = h.rows();
  Matrix l = Matrix::Zero(n * n, n * n);
  const Matrix hd = h.adjoint();
  // Unknown X(p, q) sits at column p + n q; equation (r, c) at row r + n c.
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      for (Eigen::Index k = 0; k < n; ++k) {
        l(r + n * c, k + n * c) += hd(r, k);  // (H^dag X)(r, c)
        l(r + n * c, r + n * k) -= h(k, c);   // (X H)(r, c)
      }
    }
  }
  Eigen::FullPivLU<Matrix> lu(l);
  lu.setThreshold(threshold);
  return n * n - lu.rank();
}

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

inline Vector random_unit(std::mt19937_64& rng, Eigen::Index n) {
  Vector v = random_matrix(rng, n, 1);
  return v / v.norm();
}

}  // namespace oracle
