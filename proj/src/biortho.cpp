#include "nhdyn/biortho.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>

#include "nhdyn/errors.hpp"

namespace nhdyn {
namespace {

double min_hermitian_eigenvalue(const ComplexMatrix& s) {
  const ComplexMatrix herm = 0.5 * (s + s.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace

BiorthogonalSystem build_biorthogonal(const ComplexMatrix& h, double tol_distinct) {
  require_square(h, "build_biorthogonal");
  const Eigen::Index n = h.rows();
  const double h_norm = op_norm(h);
  const double gap_floor = tol_distinct * h_norm;

  const Spectrum right = eig_general(h);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = j + 1; k < n; ++k) {
      if (std::abs(right.eigenvalues(j) - right.eigenvalues(k)) <= gap_floor) {
        std::ostringstream os;
        os << "degenerate spectrum: eigenvalues " << j << " and " << k << " ("
           << right.eigenvalues(j) << ", " << right.eigenvalues(k) << ") are closer than "
           << tol_distinct << " * ||H||";
        throw DegenerateSpectrumError(os.str(), static_cast<std::size_t>(j),
                                      static_cast<std::size_t>(k));
      }
    }
  }

  const Spectrum left = eig_general(h.adjoint());

  // Eigenvalue E_k of H pairs with conj(E_k) of H^dagger.
  std::vector<Eigen::Index> partner(static_cast<std::size_t>(n), -1);
  std::vector<bool> taken(static_cast<std::size_t>(n), false);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex target = std::conj(right.eigenvalues(k));
    Eigen::Index best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (Eigen::Index l = 0; l < n; ++l) {
      const double d = std::abs(left.eigenvalues(l) - target);
      if (d < best_dist) {
        best_dist = d;
        best = l;
      }
    }
    if (taken[static_cast<std::size_t>(best)]) {
      std::ostringstream os;
      os << "degenerate spectrum: eigenvalue " << k
         << " pairs with an adjoint eigenvector already claimed";
      const auto other = static_cast<std::size_t>(
          std::find(partner.begin(), partner.end(), best) - partner.begin());
      throw DegenerateSpectrumError(os.str(), other, static_cast<std::size_t>(k));
    }
    taken[static_cast<std::size_t>(best)] = true;
    partner[static_cast<std::size_t>(k)] = best;
  }

  BiorthogonalSystem sys;
  sys.dim = n;
  sys.eigenvalues = right.eigenvalues;
  sys.phi = right.right_vectors;
  sys.psi.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    ComplexVector psi_k = left.right_vectors.col(partner[static_cast<std::size_t>(k)]);
    const Complex overlap = inner(sys.phi.col(k), psi_k);
    if (std::abs(overlap) == 0.0) {
      throw NumericRangeError("build_biorthogonal: eigenvector pair is orthogonal");
    }
    sys.psi.col(k) = psi_k / overlap;
  }
  sys.s_phi = sys.phi * sys.phi.adjoint();
  sys.s_psi = sys.psi * sys.psi.adjoint();
  sys.condition = right.condition_estimate;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (std::abs(sys.eigenvalues(k).imag()) > gap_floor) sys.non_real_spectrum = true;
  }
  return sys;
}

IntertwiningResidual verify_intertwining(const BiorthogonalSystem& sys, const ComplexMatrix& h) {
  if (h.rows() != sys.dim || h.cols() != sys.dim) {
    throw DimensionError("verify_intertwining: H does not match the system dimension");
  }
  const ComplexMatrix hd = h.adjoint();
  const double hn = h.norm();
  IntertwiningResidual r;
  if (hn == 0.0) return r;
  r.s_psi = (sys.s_psi * h - hd * sys.s_psi).norm() / (hn * sys.s_psi.norm());
  r.s_phi = (sys.s_phi * hd - h * sys.s_phi).norm() / (hn * sys.s_phi.norm());
  return r;
}

BiorthoDiagnostics diagnose(const BiorthogonalSystem& sys) {
  const Eigen::Index n = sys.dim;
  const ComplexMatrix id = identity(n);
  BiorthoDiagnostics d;
  d.biorthogonality = (sys.phi.adjoint() * sys.psi - id).cwiseAbs().maxCoeff();
  d.resolution = (sys.phi * sys.psi.adjoint() - id).norm();
  d.metric_inverse = (sys.s_phi * sys.s_psi - id).norm();
  double maps = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    maps = std::max(maps, (sys.s_phi * sys.psi.col(k) - sys.phi.col(k)).norm());
    maps = std::max(maps, (sys.s_psi * sys.phi.col(k) - sys.psi.col(k)).norm());
  }
  d.metric_maps = maps;
  d.min_eig_s_phi = min_hermitian_eigenvalue(sys.s_phi);
  d.min_eig_s_psi = min_hermitian_eigenvalue(sys.s_psi);
  return d;
}

ExpansionResidual expansion_residual(const BiorthogonalSystem& sys, const ComplexVector& f) {
  if (f.size() != sys.dim) throw DimensionError("expansion_residual: vector size mismatch");
  const double fn = f.norm();
  ExpansionResidual r;
  if (fn == 0.0) return r;
  // sum_k <phi_k, f> Psi_k = Psi (Phi^dag f)
  r.via_phi_coefficients = (sys.psi * (sys.phi.adjoint() * f) - f).norm() / fn;
  r.via_psi_coefficients = (sys.phi * (sys.psi.adjoint() * f) - f).norm() / fn;
  return r;
}

}  // namespace nhdyn
