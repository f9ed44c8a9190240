#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "nhdyn/linalg.hpp"

namespace nhdyn {

inline constexpr double kDefaultTolTrunc = 1e-12;
inline constexpr std::size_t kDefaultSeriesCap = 500;
inline constexpr double kSymmetryResidualFactor = 1e-9;

// A Hamiltonian together with the quantities every gamma-dynamics
// operation needs. Immutable after construction.
class GammaContext {
 public:
  explicit GammaContext(ComplexMatrix h);

  const ComplexMatrix& h() const noexcept { return h_; }
  const ComplexMatrix& h_adjoint() const noexcept { return h_adjoint_; }
  double h_norm() const noexcept { return h_norm_; }
  Eigen::Index dim() const noexcept { return h_.rows(); }
  bool is_hermitian(double tol = 1e-12) const;

  // e^{-iHt}
  ComplexMatrix propagator(double t) const;

 private:
  ComplexMatrix h_;
  ComplexMatrix h_adjoint_;
  double h_norm_;
};

// gamma^t(X) = e^{iH^dag t} X e^{-iHt}
ComplexMatrix gamma_t(const GammaContext& ctx, const ComplexMatrix& x, double t);

// delta_gamma(X) = i (H^dag X - X H)
ComplexMatrix delta_gamma(const GammaContext& ctx, const ComplexMatrix& x);

struct SeriesResult {
  ComplexMatrix value;
  std::size_t terms_used = 0;
  double tail_bound = 0.0;  // certified bound on the operator-norm truncation error
};

struct TruncationOrder {
  std::size_t order = 0;  // K: terms k = 0..K are summed
  double tail = 0.0;      // certified bound on scale * sum_{k>K} rate^k / k!
};

// Smallest K <= cap whose tail bound falls below tol. The tail is bounded by
// the geometric majorant c_{K+1} / (1 - rate/(K+2)), valid once K+2 > rate.
std::optional<TruncationOrder> series_truncation_order(double rate, double scale, double tol,
                                                       std::size_t cap);

// Partial sum of sum_k t^k delta_gamma^k(X) / k!, truncated with the a-priori
// bound ||delta_gamma^k(X)|| <= (2||H||)^k ||X||. Throws TruncationError when
// more than `cap` terms are needed.
SeriesResult gamma_series(const GammaContext& ctx, const ComplexMatrix& x, double t,
                          double tol_trunc = kDefaultTolTrunc,
                          std::size_t cap = kDefaultSeriesCap);

struct NormSample {
  double t = 0.0;
  double value = 0.0;                // I(t) = ||e^{-iHt} psi0||^2
  double derivative = 0.0;           // i <Psi(t), (H^dag - H) Psi(t)>
  double derivative_residual = 0.0;  // |central difference - derivative|
};

// Evolution of I(t) = ||Psi(t)||^2 with the analytic derivative checked
// against a central difference of step equal to the local grid spacing.
std::vector<NormSample> identity_norm_evolution(const GammaContext& ctx,
                                                const ComplexVector& psi0,
                                                std::span<const double> t_grid);

struct SymmetryBasis {
  std::vector<ComplexMatrix> generators;  // Frobenius-orthonormal
  std::vector<double> residuals;          // ||H^dag X - X H||_F per generator
  Eigen::Index chain_closure_dim = 0;     // dim span{X H^k, k < N} of the first generator
};

// Kernel of X -> H^dag X - X H, computed as the nullspace of
// (1 kron H^dag - H^T kron 1) acting on vec(X).
SymmetryBasis gamma_symmetry_basis(const GammaContext& ctx,
                                   double rank_tol_rel = kDefaultRankTolRel);

// X, XH, ..., XH^{N-1}
std::vector<ComplexMatrix> symmetry_chain(const GammaContext& ctx, const ComplexMatrix& x);

// ||H^dag X - X H||_F <= 1e-9 ||H|| ||X||_F
bool is_gamma_symmetry(const GammaContext& ctx, const ComplexMatrix& x,
                       double factor = kSymmetryResidualFactor);

struct SimilarityResult {
  ComplexMatrix h;                  // R H0 R^{-1}
  double commutator_residual = 0.0;  // ||[H0, R^dag R]||_F
  double r_condition = 0.0;
};

SimilarityResult similar_norm_preserving(const ComplexMatrix& h0, const ComplexMatrix& r);

// sup over the grid of ||e^{iH^dag t} e^{-iHt} - 1||, i.e. of ||gamma^t(1) - 1||.
double identity_drift(const GammaContext& ctx, std::span<const double> t_grid);

}  // namespace nhdyn
