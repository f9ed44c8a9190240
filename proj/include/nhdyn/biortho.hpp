#pragma once

#include "nhdyn/linalg.hpp"

namespace nhdyn {

inline constexpr double kDefaultTolDistinct = 1e-8;
inline constexpr double kDefaultTolBiortho = 1e-10;

// Right eigenvectors phi_k of H and Psi_k of H^dagger, scaled so that
// <phi_k, Psi_l> = delta_kl, plus the metric operators
//   S_phi = sum |phi_k><phi_k|,   S_Psi = sum |Psi_k><Psi_k|.
// phi_k keep unit Euclidean norm; Psi_k absorb the gauge.
struct BiorthogonalSystem {
  Eigen::Index dim = 0;
  ComplexVector eigenvalues;
  ComplexMatrix phi;  // columns phi_k
  ComplexMatrix psi;  // columns Psi_k
  ComplexMatrix s_phi;
  ComplexMatrix s_psi;
  double condition = 0.0;         // 2-norm condition number of phi
  bool non_real_spectrum = false;  // set when some |Im E_k| exceeds tol_distinct*||H||
};

// Throws DegenerateSpectrumError naming the colliding pair when two
// eigenvalues are closer than tol_distinct * ||H||.
BiorthogonalSystem build_biorthogonal(const ComplexMatrix& h,
                                      double tol_distinct = kDefaultTolDistinct);

struct IntertwiningResidual {
  double s_psi = 0.0;  // ||S_Psi H - H^dag S_Psi||_F / (||H||_F ||S_Psi||_F)
  double s_phi = 0.0;  // ||S_phi H^dag - H S_phi||_F / (||H||_F ||S_phi||_F)
};

IntertwiningResidual verify_intertwining(const BiorthogonalSystem& sys, const ComplexMatrix& h);

// All the structural invariants of a BiorthogonalSystem as residuals.
struct BiorthoDiagnostics {
  double biorthogonality = 0.0;  // max |<phi_k, Psi_l> - delta_kl|
  double resolution = 0.0;       // ||sum |phi_k><Psi_k| - 1||_F
  double metric_inverse = 0.0;   // ||S_phi S_Psi - 1||_F
  double metric_maps = 0.0;      // max ||S_phi Psi_k - phi_k||, ||S_Psi phi_k - Psi_k||
  double min_eig_s_phi = 0.0;
  double min_eig_s_psi = 0.0;
};

BiorthoDiagnostics diagnose(const BiorthogonalSystem& sys);

struct ExpansionResidual {
  double via_phi_coefficients = 0.0;  // ||sum <phi_k,f> Psi_k - f|| / ||f||
  double via_psi_coefficients = 0.0;  // ||sum <Psi_k,f> phi_k - f|| / ||f||
};

ExpansionResidual expansion_residual(const BiorthogonalSystem& sys, const ComplexVector& f);

}  // namespace nhdyn
