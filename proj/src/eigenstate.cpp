#include "nhdyn/eigenstate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nhdyn/errors.hpp"
#include "nhdyn/nonlinear_flow.hpp"

namespace nhdyn {

EigenstateContext::EigenstateContext(const ComplexMatrix& h, Eigen::Index k0) : h_(h), k0_(k0) {
  require_square(h_, "EigenstateContext");
  const Spectrum sp = eig_general(h_);
  if (k0 < 0 || k0 >= sp.eigenvalues.size()) {
    std::ostringstream os;
    os << "EigenstateContext: eigen index " << k0 << " outside [0, " << sp.eigenvalues.size()
       << ")";
    throw ValidationError(os.str());
  }
  energy_ = sp.eigenvalues(k0);
  phi_ = sp.right_vectors.col(k0);
  validate();
}

EigenstateContext::EigenstateContext(const ComplexMatrix& h, Complex energy,
                                     const ComplexVector& phi)
    : h_(h), energy_(energy), phi_(phi) {
  require_square(h_, "EigenstateContext");
  if (phi_.size() != h_.rows()) throw DimensionError("EigenstateContext: eigenvector size");
  validate();
}

void EigenstateContext::validate() {
  require_finite(h_, "EigenstateContext");
  h_norm_ = op_norm(h_);
  if (std::abs(phi_.norm() - 1.0) > 1e-12) {
    throw ValidationError("EigenstateContext: eigenvector must have unit norm");
  }
  const double residual = (h_ * phi_ - energy_ * phi_).norm();
  if (residual > 1e-10 * h_norm_) {
    std::ostringstream os;
    os << "EigenstateContext: ||H phi - E phi|| = " << residual << " is not an eigenpair";
    throw ValidationError(os.str());
  }
  shifted_ = h_;
  shifted_.diagonal().array() -= energy_;
}

ComplexMatrix special_delta(const EigenstateContext& ctx, const ComplexMatrix& x) {
  if (x.rows() != ctx.h().rows() || x.cols() != ctx.h().cols()) {
    throw DimensionError("special_delta: dimension mismatch");
  }
  return kI * (ctx.h().adjoint() * x - x * ctx.h()) - 2.0 * ctx.energy_im() * x;
}

SeriesResult beta_series(const EigenstateContext& ctx, const ComplexMatrix& x, double t,
                         double tol_trunc, std::size_t cap) {
  const double rate = (2.0 * ctx.h_norm() + 2.0 * std::abs(ctx.energy_im())) * std::abs(t);
  const auto order = series_truncation_order(rate, op_norm(x), tol_trunc, cap);
  if (!order) {
    std::ostringstream os;
    os << "beta_series: more than " << cap << " terms needed for tolerance " << tol_trunc;
    throw TruncationError(os.str());
  }
  SeriesResult out;
  out.value = x;
  ComplexMatrix term = x;
  for (std::size_t k = 1; k <= order->order; ++k) {
    term = (t / static_cast<double>(k)) * special_delta(ctx, term);
    out.value += term;
  }
  out.terms_used = order->order + 1;
  out.tail_bound = order->tail;
  return out;
}

ComplexMatrix gamma_hat(const EigenstateContext& ctx, const ComplexMatrix& x, double t) {
  if (x.rows() != ctx.h().rows() || x.cols() != ctx.h().cols()) {
    throw DimensionError("gamma_hat: dimension mismatch");
  }
  const ComplexMatrix u = expm(Complex(0.0, -t) * ctx.shifted());
  return u.adjoint() * x * u;
}

WeakIdentityReport weak_identity_report(const EigenstateContext& ctx,
                                        std::span<const double> t_grid, const ComplexMatrix& x,
                                        const ComplexMatrix& y,
                                        std::span<const ComplexMatrix> probes) {
  const Eigen::Index n = ctx.h().rows();
  const ComplexMatrix id = identity(n);
  const ComplexVector& phi = ctx.phi();
  const ComplexMatrix xy = x * y;

  WeakIdentityReport rep;
  rep.derivation_mean = std::abs(inner(phi, special_delta(ctx, id) * phi));
  for (double t : t_grid) {
    const ComplexMatrix u = expm(Complex(0.0, -t) * ctx.shifted());
    const ComplexMatrix ud = u.adjoint();
    const ComplexMatrix g_id = ud * u;
    rep.identity_mean = std::max(rep.identity_mean, std::abs(inner(phi, g_id * phi) - 1.0));
    rep.identity_operator = std::max(rep.identity_operator, op_norm(g_id - id));
    const ComplexMatrix gx = ud * x * u;
    const ComplexMatrix gy = ud * y * u;
    const ComplexMatrix gxy = ud * xy * u;
    rep.automorphism_witness = std::max(
        rep.automorphism_witness, std::abs(inner(phi, gxy * phi) - inner(phi, gx * gy * phi)));
  }
  for (const ComplexMatrix& p : probes) {
    rep.max_mean_derivative =
        std::max(rep.max_mean_derivative, std::abs(mean_derivative(ctx.h(), p, phi)));
  }
  return rep;
}

}  // namespace nhdyn
