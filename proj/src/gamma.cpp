#include "nhdyn/gamma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "nhdyn/errors.hpp"

namespace nhdyn {

GammaContext::GammaContext(ComplexMatrix h) : h_(std::move(h)) {
  require_square(h_, "GammaContext");
  require_finite(h_, "GammaContext");
  h_adjoint_ = h_.adjoint();
  h_norm_ = op_norm(h_);
}

bool GammaContext::is_hermitian(double tol) const {
  return (h_ - h_adjoint_).norm() <= tol * std::max(1.0, h_.norm());
}

ComplexMatrix GammaContext::propagator(double t) const { return expm(Complex(0.0, -t) * h_); }

namespace {

void require_same_dim(const GammaContext& ctx, const ComplexMatrix& x, const char* what) {
  if (x.rows() != ctx.dim() || x.cols() != ctx.dim()) {
    std::ostringstream os;
    os << what << ": operator is " << x.rows() << "x" << x.cols() << ", Hamiltonian is "
       << ctx.dim() << "x" << ctx.dim();
    throw DimensionError(os.str());
  }
}

}  // namespace

ComplexMatrix gamma_t(const GammaContext& ctx, const ComplexMatrix& x, double t) {
  require_same_dim(ctx, x, "gamma_t");
  const ComplexMatrix u = ctx.propagator(t);
  // e^{iH^dag t} = (e^{-iHt})^dag
  return u.adjoint() * x * u;
}

ComplexMatrix delta_gamma(const GammaContext& ctx, const ComplexMatrix& x) {
  require_same_dim(ctx, x, "delta_gamma");
  return kI * (ctx.h_adjoint() * x - x * ctx.h());
}

std::optional<TruncationOrder> series_truncation_order(double rate, double scale, double tol,
                                                       std::size_t cap) {
  if (!(tol > 0.0)) throw ValidationError("series truncation tolerance must be positive");
  rate = std::abs(rate);
  if (rate == 0.0 || scale == 0.0) return TruncationOrder{0, 0.0};
  const double log_rate = std::log(rate);
  for (std::size_t k = 0; k <= cap; ++k) {
    const double next = static_cast<double>(k) + 1.0;
    if (rate >= next + 1.0) continue;
    const double log_term = next * log_rate - std::lgamma(next + 1.0);
    const double tail = scale * std::exp(log_term) / (1.0 - rate / (next + 1.0));
    if (tail < tol) return TruncationOrder{k, tail};
  }
  return std::nullopt;
}

SeriesResult gamma_series(const GammaContext& ctx, const ComplexMatrix& x, double t,
                          double tol_trunc, std::size_t cap) {
  require_same_dim(ctx, x, "gamma_series");
  const auto order =
      series_truncation_order(2.0 * ctx.h_norm() * std::abs(t), op_norm(x), tol_trunc, cap);
  if (!order) {
    std::ostringstream os;
    os << "gamma_series: more than " << cap << " terms needed for tolerance " << tol_trunc;
    throw TruncationError(os.str());
  }
  SeriesResult out;
  out.value = x;
  ComplexMatrix term = x;  // t^k delta^k(X) / k!
  for (std::size_t k = 1; k <= order->order; ++k) {
    term = (t / static_cast<double>(k)) * delta_gamma(ctx, term);
    out.value += term;
  }
  out.terms_used = order->order + 1;
  out.tail_bound = order->tail;
  return out;
}

std::vector<NormSample> identity_norm_evolution(const GammaContext& ctx,
                                                const ComplexVector& psi0,
                                                std::span<const double> t_grid) {
  if (t_grid.empty()) throw ValidationError("identity_norm_evolution: empty time grid");
  if (psi0.size() != ctx.dim()) throw DimensionError("identity_norm_evolution: state size");
  if (psi0.norm() == 0.0) throw ValidationError("identity_norm_evolution: zero initial state");

  const ComplexMatrix gap = ctx.h_adjoint() - ctx.h();
  auto norm_sq_at = [&](double t) { return (ctx.propagator(t) * psi0).squaredNorm(); };

  std::vector<NormSample> out;
  out.reserve(t_grid.size());
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    double step = std::numeric_limits<double>::infinity();
    if (j > 0) step = std::min(step, t_grid[j] - t_grid[j - 1]);
    if (j + 1 < t_grid.size()) step = std::min(step, t_grid[j + 1] - t_grid[j]);
    if (!std::isfinite(step) || step <= 0.0) step = 1e-3;

    const double t = t_grid[j];
    const ComplexVector psi = ctx.propagator(t) * psi0;
    NormSample s;
    s.t = t;
    s.value = psi.squaredNorm();
    s.derivative = (kI * inner(psi, gap * psi)).real();
    const double fd = (norm_sq_at(t + step) - norm_sq_at(t - step)) / (2.0 * step);
    s.derivative_residual = std::abs(fd - s.derivative);
    out.push_back(s);
  }
  return out;
}

SymmetryBasis gamma_symmetry_basis(const GammaContext& ctx, double rank_tol_rel) {
  const Eigen::Index n = ctx.dim();
  const ComplexMatrix id = identity(n);
  const ComplexMatrix op = kron(id, ctx.h_adjoint()) - kron(ctx.h().transpose(), id);
  const ComplexMatrix kernel = nullspace(op, rank_tol_rel);

  SymmetryBasis basis;
  basis.generators.reserve(static_cast<std::size_t>(kernel.cols()));
  for (Eigen::Index c = 0; c < kernel.cols(); ++c) {
    ComplexMatrix x = unvec(kernel.col(c), n, n);
    basis.residuals.push_back((ctx.h_adjoint() * x - x * ctx.h()).norm());
    basis.generators.push_back(std::move(x));
  }
  if (!basis.generators.empty()) {
    const auto chain = symmetry_chain(ctx, basis.generators.front());
    ComplexMatrix stacked(n * n, static_cast<Eigen::Index>(chain.size()));
    for (std::size_t k = 0; k < chain.size(); ++k) {
      stacked.col(static_cast<Eigen::Index>(k)) = vec(chain[k]);
    }
    basis.chain_closure_dim = numerical_rank(stacked, rank_tol_rel);
  }
  return basis;
}

std::vector<ComplexMatrix> symmetry_chain(const GammaContext& ctx, const ComplexMatrix& x) {
  require_same_dim(ctx, x, "symmetry_chain");
  std::vector<ComplexMatrix> chain;
  chain.reserve(static_cast<std::size_t>(ctx.dim()));
  ComplexMatrix member = x;
  for (Eigen::Index k = 0; k < ctx.dim(); ++k) {
    chain.push_back(member);
    member = member * ctx.h();
  }
  return chain;
}

bool is_gamma_symmetry(const GammaContext& ctx, const ComplexMatrix& x, double factor) {
  require_same_dim(ctx, x, "is_gamma_symmetry");
  const double residual = (ctx.h_adjoint() * x - x * ctx.h()).norm();
  return residual <= factor * ctx.h_norm() * x.norm();
}

SimilarityResult similar_norm_preserving(const ComplexMatrix& h0, const ComplexMatrix& r) {
  require_square(h0, "similar_norm_preserving");
  require_square(r, "similar_norm_preserving");
  if (r.rows() != h0.rows()) throw DimensionError("similar_norm_preserving: R and H0 differ in size");
  if ((h0 - h0.adjoint()).norm() > 1e-12 * std::max(1.0, h0.norm())) {
    throw ValidationError("similar_norm_preserving: H0 is not Hermitian");
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(r);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  if (!(smin > 1e-14 * sv(0))) throw ValidationError("similar_norm_preserving: R is singular");

  SimilarityResult out;
  out.r_condition = sv(0) / smin;
  out.h = r * h0 * r.fullPivLu().inverse();
  const ComplexMatrix metric = r.adjoint() * r;
  out.commutator_residual = (h0 * metric - metric * h0).norm();
  return out;
}

double identity_drift(const GammaContext& ctx, std::span<const double> t_grid) {
  const ComplexMatrix id = identity(ctx.dim());
  double worst = 0.0;
  for (double t : t_grid) {
    worst = std::max(worst, op_norm(gamma_t(ctx, id, t) - id));
  }
  return worst;
}

}  // namespace nhdyn
