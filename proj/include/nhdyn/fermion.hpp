#pragma once

// Fermionic modes realized on C^(2^n) with Jordan-Wigner sign strings
// anchored at mode 1. Occupation (n_1, ..., n_m) maps to the basis column
// sum_j n_j 2^(m-j), so the vacuum is e_0 and for three modes (i,j,k) -> 4i+2j+k.
// Building phi_{ijk} by applying creators in ascending mode order yields
// +e_{4i+2j+k}: no sign is ever picked up.

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nhdyn/linalg.hpp"

namespace nhdyn {

using Occupation = std::vector<int>;

struct CarAlgebra {
  int n_modes = 0;
  Eigen::Index dim = 0;
  std::vector<ComplexMatrix> lowering;    // b_j, j = 0..n_modes-1 (mode j+1)
  std::vector<ComplexMatrix> number_ops;  // N_j = b_j^dag b_j

  const ComplexMatrix& b(int mode) const { return lowering.at(static_cast<std::size_t>(mode - 1)); }
  ComplexMatrix b_dag(int mode) const { return b(mode).adjoint(); }
  const ComplexMatrix& n(int mode) const {
    return number_ops.at(static_cast<std::size_t>(mode - 1));
  }
  ComplexMatrix total_number() const;

  Eigen::Index index_of(const Occupation& occ) const;
  Occupation occupation_of(Eigen::Index index) const;
  ComplexVector vacuum() const;
  // b_{m_1}^dag ... b_{m_k}^dag vacuum for the occupied modes in ascending order.
  ComplexVector basis_state(const Occupation& occ) const;
};

// 1 <= n_modes <= 10
CarAlgebra build_car(int n_modes);

// Largest entrywise deviation from {b_k, b_j^dag} = delta_kj, b_j^2 = 0,
// N_j^2 = N_j and b_j vacuum = 0.
double car_residual(const CarAlgebra& alg);

// Parses "011", "phi011" or "phi_011" into an occupation of the given length.
Occupation parse_occupation(std::string_view label, int n_modes);
std::string occupation_label(const Occupation& occ);

// Three-mode model driven by H = b_1^dag (lambda b_2 + mu b_3).
class DmModel {
 public:
  // lambda and mu must be strictly positive unless allow_zero is set.
  DmModel(double lambda, double mu, bool allow_zero = false);

  const CarAlgebra& algebra() const noexcept { return algebra_; }
  double lambda() const noexcept { return lambda_; }
  double mu() const noexcept { return mu_; }
  const ComplexMatrix& h() const noexcept { return h_; }

 private:
  CarAlgebra algebra_;
  double lambda_;
  double mu_;
  ComplexMatrix h_;
};

struct Occupations {
  double n1 = 0.0;
  double n2 = 0.0;
  double n3 = 0.0;
  double sum() const noexcept { return n1 + n2 + n3; }
};

// Rational closed forms, available for phi_011 and phi_010 only; other
// labels throw ClosedFormUnavailable.
Occupations closed_form_occupations(const DmModel& model, const Occupation& initial, double t);

// Closed form of <Psi_hat(t), (H^dag - H) Psi_hat(t)>, same two labels.
Complex closed_form_scalar_term(const DmModel& model, const Occupation& initial, double t);

struct OccupationRow {
  double t = 0.0;
  Occupations n;
  double sum = 0.0;
  Complex scalar;  // <Psi_hat, (H^dag - H) Psi_hat>
};

struct OccupationTrajectory {
  std::vector<OccupationRow> rows;
  // sup |n_j(expm route) - n_j(U = 1 - iHt route)|
  double nilpotent_oracle_deviation = 0.0;
  // sup |n_j - closed form| when a closed form exists, otherwise negative
  double closed_form_deviation = -1.0;
};

OccupationTrajectory simulate_occupations(const DmModel& model, const Occupation& initial,
                                          std::span<const double> t_grid);

// ||delta_gamma(N) - RHS||_F with
// RHS = i lambda (b2^dag b1 - b1^dag b2)(1 + N3) + i mu (b3^dag b1 - b1^dag b3)(1 + N2).
double delta_gamma_n_check(const DmModel& model);

// sup over the grid of |numerical scalar term - closed form|.
double scalar_term_check(const DmModel& model, const Occupation& initial,
                         std::span<const double> t_grid);

// sup_t ||e^{-iHt} - (1 - iHt)||
double nilpotent_propagator_residual(const DmModel& model, std::span<const double> t_grid);

}  // namespace nhdyn
