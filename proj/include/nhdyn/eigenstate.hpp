#pragma once

// Normalized dynamics started from an eigenvector phi of H with (possibly
// complex) eigenvalue E = E_r + i E_i. Along that trajectory the
// state-dependent derivation is time independent,
//   delta_hat(X) = delta_gamma(X) - 2 E_i X,
// and its exponential series coincides with conjugation by the shifted
// propagators e^{-i(H - E)t}.

#include <span>
#include <vector>

#include "nhdyn/gamma.hpp"
#include "nhdyn/linalg.hpp"

namespace nhdyn {

class EigenstateContext {
 public:
  // Uses the k0-th eigenpair of eig_general(h) (0-based, sorted by (Re, Im)).
  EigenstateContext(const ComplexMatrix& h, Eigen::Index k0);

  // Uses a caller-supplied eigenpair; validates ||H phi - E phi|| <= 1e-10 ||H||.
  EigenstateContext(const ComplexMatrix& h, Complex energy, const ComplexVector& phi);

  const ComplexMatrix& h() const noexcept { return h_; }
  Eigen::Index k0() const noexcept { return k0_; }
  Complex energy() const noexcept { return energy_; }
  double energy_re() const noexcept { return energy_.real(); }
  double energy_im() const noexcept { return energy_.imag(); }
  const ComplexVector& phi() const noexcept { return phi_; }
  // H - E 1
  const ComplexMatrix& shifted() const noexcept { return shifted_; }
  double h_norm() const noexcept { return h_norm_; }

 private:
  void validate();

  ComplexMatrix h_;
  Eigen::Index k0_ = -1;
  Complex energy_;
  ComplexVector phi_;
  ComplexMatrix shifted_;
  double h_norm_ = 0.0;
};

ComplexMatrix special_delta(const EigenstateContext& ctx, const ComplexMatrix& x);

// sum_k t^k special_delta^k(X) / k!, tail bounded with
// ||special_delta(X)|| <= (2||H|| + 2|E_i|) ||X||.
SeriesResult beta_series(const EigenstateContext& ctx, const ComplexMatrix& x, double t,
                         double tol_trunc = kDefaultTolTrunc,
                         std::size_t cap = kDefaultSeriesCap);

// e^{i (H-E)^dag t} X e^{-i (H-E) t}
ComplexMatrix gamma_hat(const EigenstateContext& ctx, const ComplexMatrix& x, double t);

struct WeakIdentityReport {
  double identity_mean = 0.0;        // sup_t |<phi, gamma_hat^t(1) phi> - 1|
  double derivation_mean = 0.0;      // sup_t |<phi, delta_hat(1) phi>|
  double identity_operator = 0.0;    // sup_t ||gamma_hat^t(1) - 1||, nonzero unless E_i = 0 and H = H^dag
  double automorphism_witness = 0.0;  // sup_t |<phi, g(XY) phi> - <phi, g(X) g(Y) phi>|
  double max_mean_derivative = 0.0;  // sup over the probes of |<phi, delta_hat(P) phi>|
};

// `x` and `y` are the pair used for the automorphism witness; `probes` are
// extra observables whose mean derivative at phi is reported.
WeakIdentityReport weak_identity_report(const EigenstateContext& ctx,
                                        std::span<const double> t_grid, const ComplexMatrix& x,
                                        const ComplexMatrix& y,
                                        std::span<const ComplexMatrix> probes = {});

}  // namespace nhdyn
