#include "nhdyn/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include "nhdyn/errors.hpp"

namespace nhdyn {

bool all_finite(const ComplexMatrix& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const Complex z = a(i, j);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
  }
  return true;
}

void require_finite(const ComplexMatrix& a, const char* what) {
  if (!all_finite(a)) {
    throw NumericRangeError(std::string(what) + ": non-finite entry");
  }
}

void require_square(const ComplexMatrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    std::ostringstream os;
    os << what << ": expected a non-empty square matrix, got " << a.rows() << "x" << a.cols();
    throw DimensionError(os.str());
  }
}

ComplexMatrix identity(Eigen::Index n) { return ComplexMatrix::Identity(n, n); }

ComplexMatrix expm(const ComplexMatrix& a) {
  require_square(a, "expm");
  require_finite(a, "expm");
  ComplexMatrix result = a.exp();
  if (!all_finite(result)) {
    throw NumericRangeError("expm: overflow during squaring");
  }
  return result;
}

Spectrum eig_general(const ComplexMatrix& a, double tol_eig) {
  require_square(a, "eig_general");
  require_finite(a, "eig_general");

  Eigen::ComplexEigenSolver<ComplexMatrix> solver(a, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("eig_general: Schur iteration did not converge",
                           std::numeric_limits<double>::infinity());
  }

  const Eigen::Index n = a.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const ComplexVector& values = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    if (values(x).real() != values(y).real()) return values(x).real() < values(y).real();
    return values(x).imag() < values(y).imag();
  });

  Spectrum sp;
  sp.eigenvalues.resize(n);
  sp.right_vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    sp.eigenvalues(k) = values(order[static_cast<std::size_t>(k)]);
    ComplexVector v = solver.eigenvectors().col(order[static_cast<std::size_t>(k)]);
    const double nv = v.norm();
    if (nv > 0.0) v /= nv;
    sp.right_vectors.col(k) = v;
  }

  const double a_norm = op_norm(a);
  for (Eigen::Index k = 0; k < n; ++k) {
    const ComplexVector v = sp.right_vectors.col(k);
    const double residual = (a * v - sp.eigenvalues(k) * v).norm();
    if (residual > tol_eig * a_norm * v.norm() + std::numeric_limits<double>::min()) {
      std::ostringstream os;
      os << "eig_general: eigenpair " << k << " residual " << residual << " exceeds "
         << tol_eig << " * ||A||";
      throw ConvergenceError(os.str(), residual);
    }
  }

  Eigen::JacobiSVD<ComplexMatrix> svd(sp.right_vectors);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  sp.condition_estimate =
      smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
  return sp;
}

ComplexMatrix nullspace(const ComplexMatrix& l, double rank_tol_rel) {
  if (!(rank_tol_rel > 0.0 && rank_tol_rel < 1.0)) {
    throw ValidationError("nullspace: rank_tol_rel must lie in (0, 1)");
  }
  if (l.cols() == 0) return ComplexMatrix(0, 0);
  require_finite(l, "nullspace");
  if (l.rows() == 0) return identity(l.cols());

  Eigen::BDCSVD<ComplexMatrix> svd(l, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (smax > 0.0 && sv(i) >= rank_tol_rel * smax) ++rank;
  }
  const Eigen::Index n = l.cols();
  return svd.matrixV().rightCols(n - rank);
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b, std::size_t max_entries) {
  const auto rows = static_cast<std::size_t>(a.rows()) * static_cast<std::size_t>(b.rows());
  const auto cols = static_cast<std::size_t>(a.cols()) * static_cast<std::size_t>(b.cols());
  if (cols != 0 && rows > max_entries / cols) {
    std::ostringstream os;
    os << "kron: result " << rows << "x" << cols << " exceeds " << max_entries << " entries";
    throw DimensionError(os.str());
  }
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

double op_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues()(0);
}

ComplexVector vec(const ComplexMatrix& x) {
  return Eigen::Map<const ComplexVector>(x.data(), x.size());
}

ComplexMatrix unvec(const ComplexVector& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) {
    throw DimensionError("unvec: length does not match rows*cols");
  }
  return Eigen::Map<const ComplexMatrix>(v.data(), rows, cols);
}

Eigen::Index numerical_rank(const ComplexMatrix& a, double rank_tol_rel) {
  if (a.size() == 0) return 0;
  Eigen::BDCSVD<ComplexMatrix> svd(a);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) >= rank_tol_rel * sv(0)) ++rank;
  }
  return rank;
}

}  // namespace nhdyn
