#pragma once

// Dynamics of the normalized state Psi_hat(t) = Psi(t) / ||Psi(t)||,
// which obeys i dPsi_hat/dt = H_nl(t) Psi_hat with
//   H_nl = H + (1/2) <Psi_hat, (H^dag - H) Psi_hat> 1,
// and the state-dependent derivation
//   delta_hat(X) = delta_gamma(X) - i X <Psi_hat, (H^dag - H) Psi_hat>.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nhdyn/gamma.hpp"
#include "nhdyn/linalg.hpp"

namespace nhdyn {

inline constexpr double kDefaultTolClass = 1e-8;
inline constexpr std::size_t kDefaultGridPoints = 201;

struct StateTrajectory {
  std::vector<double> t_grid;
  std::vector<ComplexVector> psi;       // Psi(t_j), not normalized
  std::vector<ComplexVector> psi_hat;   // unit vectors
  std::vector<double> norm_sq;          // ||Psi(t_j)||^2

  std::size_t size() const noexcept { return t_grid.size(); }
};

std::vector<double> uniform_grid(double t_start, double t_end, std::size_t points);

// Psi(t_j) = e^{-iH t_j} psi0 for a unit psi0.
StateTrajectory exact_trajectory(const ComplexMatrix& h, const ComplexVector& psi0,
                                 std::span<const double> t_grid);

// <psi, (H^dag - H) psi>, evaluated as -2i Im<psi, H psi> so that it is
// exactly imaginary.
Complex non_hermitian_scalar(const ComplexMatrix& h, const ComplexVector& psi);

ComplexMatrix h_nl(const ComplexMatrix& h, const ComplexVector& psi_hat);

struct NonlinearRun {
  StateTrajectory trajectory;
  double max_deviation = 0.0;   // sup_j ||Psi_hat_numeric(t_j) - Psi_hat_exact(t_j)||
  double max_norm_drift = 0.0;  // sup_j | ||Psi_hat_numeric(t_j)|| - 1 |
};

// Classical RK4 on the nonlinear equation, `substeps` steps per grid
// interval. The state is never renormalized. Throws InstabilityError when
// the deviation from the exact normalized trajectory exceeds 0.1.
NonlinearRun integrate_nonlinear(const ComplexMatrix& h, const ComplexVector& psi_hat0,
                                 std::span<const double> t_grid, std::size_t substeps = 1);

Complex mean_value(const ComplexMatrix& x, const ComplexVector& psi_hat);

ComplexMatrix delta_psi_hat(const ComplexMatrix& h, const ComplexMatrix& x,
                            const ComplexVector& psi_hat);

// Same operator written as i (H_nl^dag X - X H_nl).
ComplexMatrix delta_psi_hat_commutator_form(const ComplexMatrix& h, const ComplexMatrix& x,
                                            const ComplexVector& psi_hat);

// <Psi_hat, delta_hat(X) Psi_hat>, the time derivative of the mean value.
Complex mean_derivative(const ComplexMatrix& h, const ComplexMatrix& x,
                        const ComplexVector& psi_hat);

struct ClassificationReport {
  std::string observable_name;
  double in_c_gamma = 0.0;          // ||delta_gamma(X)||_F
  double in_c_psi_hat = 0.0;        // sup_t ||delta_hat(X; t)||_F
  double in_c_psi_hat_weak = 0.0;   // sup_t |<Psi_hat, delta_hat(X; t) Psi_hat>|
  bool c_gamma = false;
  bool c_psi_hat = false;
  bool c_psi_hat_weak = false;
};

ClassificationReport classify(const ComplexMatrix& h, const ComplexMatrix& x,
                              const StateTrajectory& trajectory,
                              double tol_class = kDefaultTolClass, std::string name = "X");

// Worst residuals of `classify` over trajectories from several initial states.
ClassificationReport classify_ensemble(const ComplexMatrix& h, const ComplexMatrix& x,
                                       std::span<const ComplexVector> initial_states,
                                       std::span<const double> t_grid,
                                       double tol_class = kDefaultTolClass,
                                       std::string name = "X");

// For X in C_gamma: sup_j |x(t_j) - x(0) / ||Psi(t_j)||^2|. Throws
// CertificationError when X is not a gamma-symmetry or the trajectory does
// not start normalized.
double gamma_symmetry_decay_check(const ComplexMatrix& h, const ComplexMatrix& x,
                                  const StateTrajectory& trajectory);

struct NecessaryConditionResult {
  double max_residual = 0.0;        // sup_t |<Psi, dg(X) Psi> - i x0 <Psi, (H^dag - H) Psi>|
  double premise_residual = 0.0;    // weak-membership residual of X on the trajectory
  bool premise_holds = false;
};

NecessaryConditionResult necessary_condition_residual(const ComplexMatrix& h,
                                                      const ComplexMatrix& x,
                                                      const StateTrajectory& trajectory,
                                                      Complex x0,
                                                      double tol_class = kDefaultTolClass);

struct FrozenSeries {
  std::vector<double> partial_sum_norms;  // ||S_K|| for K = 0..terms-1
  std::vector<double> increment_norms;    // ||S_K - S_{K-1}||
  double tail_bound = 0.0;                // ||X|| sum_{k>K} (4||H|| t)^k / k!
  ComplexMatrix value;
};

// Partial sums of sum_k t^k delta_hat^k(X) / k! with delta_hat frozen at
// psi_hat. Only convergence is measured; no claim is made about the sum.
FrozenSeries frozen_delta_series(const ComplexMatrix& h, const ComplexMatrix& x,
                                 const ComplexVector& psi_hat, double t,
                                 double tol_trunc = kDefaultTolTrunc,
                                 std::size_t cap = kDefaultSeriesCap);

// Exploratory: how far the scalar <Psi_hat, (H^dag - H) Psi_hat> moves along
// a trajectory, and, with the generator frozen at t_0, the mismatch between
// the frozen series and conjugation by the frozen H_nl at the final time.
struct FrozenGeneratorProbe {
  double scalar_variation = 0.0;
  double series_vs_conjugation = 0.0;
};

FrozenGeneratorProbe probe_time_independent_generator(const ComplexMatrix& h,
                                                      const ComplexMatrix& x,
                                                      const StateTrajectory& trajectory,
                                                      double tol_trunc = kDefaultTolTrunc);

}  // namespace nhdyn
