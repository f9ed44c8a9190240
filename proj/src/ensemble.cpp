#include "nhdyn/ensemble.hpp"

#include <cmath>

#include <Eigen/QR>

#include "nhdyn/errors.hpp"

namespace nhdyn {

ComplexMatrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      m(i, j) = scale * Complex(re, im);
    }
  }
  return m;
}

ComplexMatrix random_unitary(Rng& rng, Eigen::Index n) {
  const ComplexMatrix g = random_matrix(rng, n, n);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  // Fix the phases so the distribution is Haar.
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double a = std::abs(r(k, k));
    if (a > 0.0) q.col(k) *= r(k, k) / a;
  }
  return q;
}

ComplexMatrix random_hermitian(Rng& rng, Eigen::Index n, double scale) {
  const ComplexMatrix g = random_matrix(rng, n, n, scale);
  return 0.5 * (g + g.adjoint());
}

ComplexVector random_unit_vector(Rng& rng, Eigen::Index n) {
  ComplexVector v = random_matrix(rng, n, 1);
  return v / v.norm();
}

HamiltonianSample random_hamiltonian(Rng& rng, Eigen::Index n, SpectrumKind kind,
                                     double v_condition) {
  if (n < 1) throw ValidationError("random_hamiltonian: dimension must be positive");
  if (!(v_condition >= 1.0)) throw ValidationError("random_hamiltonian: v_condition must be >= 1");
  std::uniform_real_distribution<double> jitter(-0.25, 0.25);
  std::uniform_real_distribution<double> imag_part(-0.5, 0.5);

  HamiltonianSample s;
  s.spectrum.resize(n);
  const double spacing = n > 1 ? 2.0 / static_cast<double>(n - 1) : 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double re = -1.0 + spacing * static_cast<double>(k) + jitter(rng) * spacing;
    s.spectrum(k) = Complex(re, kind == SpectrumKind::kComplex ? imag_part(rng) : 0.0);
  }
  if (kind == SpectrumKind::kComplex && std::abs(s.spectrum(0).imag()) < 0.1) {
    s.spectrum(0).imag(0.3);
  }

  if (kind == SpectrumKind::kHermitian) {
    s.v = random_unitary(rng, n);
    s.v_condition = 1.0;
    s.h = s.v * s.spectrum.asDiagonal() * s.v.adjoint();
    s.h = 0.5 * (s.h + s.h.adjoint());
    return s;
  }

  // V = U1 diag(sigma) U2 with sigma geometric from 1 to 1/v_condition.
  const ComplexMatrix u1 = random_unitary(rng, n);
  const ComplexMatrix u2 = random_unitary(rng, n);
  Eigen::VectorXd sigma(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double frac = n > 1 ? static_cast<double>(k) / static_cast<double>(n - 1) : 0.0;
    sigma(k) = std::pow(v_condition, -frac);
  }
  s.v = u1 * sigma.cast<Complex>().asDiagonal() * u2;
  s.v_condition = n > 1 ? v_condition : 1.0;
  ComplexMatrix v_inv = u2.adjoint() * sigma.cwiseInverse().cast<Complex>().asDiagonal() * u1.adjoint();
  s.h = s.v * s.spectrum.asDiagonal() * v_inv;
  return s;
}

}  // namespace nhdyn
