#include "nhdyn/nonlinear_flow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nhdyn/errors.hpp"

namespace nhdyn {
namespace {

void require_unit(const ComplexVector& v, double tol, const char* what) {
  if (std::abs(v.norm() - 1.0) > tol) {
    std::ostringstream os;
    os << what << ": state is not normalized (||psi|| = " << v.norm() << ")";
    throw ValidationError(os.str());
  }
}

void require_compatible(const ComplexMatrix& h, const ComplexMatrix& x, const ComplexVector& v,
                        const char* what) {
  require_square(h, what);
  if (x.rows() != h.rows() || x.cols() != h.cols() || v.size() != h.rows()) {
    throw DimensionError(std::string(what) + ": dimension mismatch");
  }
}

// delta_hat(X) for a precomputed scalar s = <Psi_hat, (H^dag - H) Psi_hat>.
ComplexMatrix delta_hat_with_scalar(const ComplexMatrix& h, const ComplexMatrix& x, Complex s) {
  return kI * (h.adjoint() * x - x * h) - kI * s * x;
}

}  // namespace

std::vector<double> uniform_grid(double t_start, double t_end, std::size_t points) {
  if (points < 2) throw ValidationError("time.points must be ≥ 2");
  if (!(t_end > t_start)) throw ValidationError("time.t_end must be greater than time.t_start");
  std::vector<double> grid(points);
  const double dt = (t_end - t_start) / static_cast<double>(points - 1);
  for (std::size_t j = 0; j < points; ++j) grid[j] = t_start + dt * static_cast<double>(j);
  grid.back() = t_end;
  return grid;
}

StateTrajectory exact_trajectory(const ComplexMatrix& h, const ComplexVector& psi0,
                                 std::span<const double> t_grid) {
  require_square(h, "exact_trajectory");
  if (psi0.size() != h.rows()) throw DimensionError("exact_trajectory: state size mismatch");
  require_unit(psi0, 1e-12, "exact_trajectory");
  if (t_grid.empty()) throw ValidationError("exact_trajectory: empty time grid");

  StateTrajectory traj;
  traj.t_grid.assign(t_grid.begin(), t_grid.end());
  traj.psi.reserve(t_grid.size());
  traj.psi_hat.reserve(t_grid.size());
  traj.norm_sq.reserve(t_grid.size());
  for (double t : t_grid) {
    ComplexVector psi = expm(Complex(0.0, -t) * h) * psi0;
    const double nsq = psi.squaredNorm();
    if (!(nsq > 0.0) || !std::isfinite(nsq)) {
      throw NumericRangeError("exact_trajectory: state norm left the representable range");
    }
    traj.psi_hat.push_back(psi / std::sqrt(nsq));
    traj.norm_sq.push_back(nsq);
    traj.psi.push_back(std::move(psi));
  }
  return traj;
}

Complex non_hermitian_scalar(const ComplexMatrix& h, const ComplexVector& psi) {
  // <psi, H^dag psi> = conj(<psi, H psi>)
  return Complex(0.0, -2.0 * inner(psi, h * psi).imag());
}

ComplexMatrix h_nl(const ComplexMatrix& h, const ComplexVector& psi_hat) {
  require_square(h, "h_nl");
  if (psi_hat.size() != h.rows()) throw DimensionError("h_nl: state size mismatch");
  require_unit(psi_hat, 1e-10, "h_nl");
  ComplexMatrix out = h;
  out.diagonal().array() += 0.5 * non_hermitian_scalar(h, psi_hat);
  return out;
}

NonlinearRun integrate_nonlinear(const ComplexMatrix& h, const ComplexVector& psi_hat0,
                                 std::span<const double> t_grid, std::size_t substeps) {
  require_square(h, "integrate_nonlinear");
  if (psi_hat0.size() != h.rows()) throw DimensionError("integrate_nonlinear: state size");
  require_unit(psi_hat0, 1e-12, "integrate_nonlinear");
  if (substeps < 1) throw ValidationError("integrate_nonlinear: substeps must be >= 1");
  if (t_grid.size() < 2) throw ValidationError("integrate_nonlinear: need at least two grid points");
  const double dt = t_grid[1] - t_grid[0];
  if (!(dt > 0.0)) throw ValidationError("integrate_nonlinear: grid must increase");
  for (std::size_t j = 1; j < t_grid.size(); ++j) {
    if (std::abs((t_grid[j] - t_grid[j - 1]) - dt) > 1e-9 * dt) {
      throw ValidationError("integrate_nonlinear: grid is not uniform");
    }
  }

  // f(psi) = -i (H + s(psi)/2) psi, with s re-evaluated at every stage.
  auto rhs = [&h](const ComplexVector& psi) -> ComplexVector {
    const ComplexVector hpsi = h * psi;
    const Complex s(0.0, -2.0 * inner(psi, hpsi).imag());
    return -kI * (hpsi + 0.5 * s * psi);
  };

  const StateTrajectory exact = exact_trajectory(h, psi_hat0, t_grid);
  NonlinearRun run;
  StateTrajectory& traj = run.trajectory;
  traj.t_grid.assign(t_grid.begin(), t_grid.end());

  ComplexVector psi = psi_hat0;
  const double step = dt / static_cast<double>(substeps);
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    if (j > 0) {
      for (std::size_t s = 0; s < substeps; ++s) {
        const ComplexVector k1 = rhs(psi);
        const ComplexVector k2 = rhs(psi + 0.5 * step * k1);
        const ComplexVector k3 = rhs(psi + 0.5 * step * k2);
        const ComplexVector k4 = rhs(psi + step * k3);
        psi += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
    }
    const double n = psi.norm();
    run.max_norm_drift = std::max(run.max_norm_drift, std::abs(n - 1.0));
    run.max_deviation = std::max(run.max_deviation, (psi - exact.psi_hat[j]).norm());
    if (!std::isfinite(run.max_deviation) || run.max_deviation > 0.1) {
      std::ostringstream os;
      os << "integrate_nonlinear: deviation " << run.max_deviation << " at t = " << t_grid[j]
         << " exceeds 0.1; increase substeps";
      throw InstabilityError(os.str());
    }
    traj.psi.push_back(psi);
    traj.psi_hat.push_back(psi / n);
    traj.norm_sq.push_back(n * n);
  }
  return run;
}

Complex mean_value(const ComplexMatrix& x, const ComplexVector& psi_hat) {
  if (x.rows() != x.cols() || x.rows() != psi_hat.size()) {
    throw DimensionError("mean_value: dimension mismatch");
  }
  return inner(psi_hat, x * psi_hat);
}

ComplexMatrix delta_psi_hat(const ComplexMatrix& h, const ComplexMatrix& x,
                            const ComplexVector& psi_hat) {
  require_compatible(h, x, psi_hat, "delta_psi_hat");
  require_unit(psi_hat, 1e-10, "delta_psi_hat");
  return delta_hat_with_scalar(h, x, non_hermitian_scalar(h, psi_hat));
}

ComplexMatrix delta_psi_hat_commutator_form(const ComplexMatrix& h, const ComplexMatrix& x,
                                            const ComplexVector& psi_hat) {
  require_compatible(h, x, psi_hat, "delta_psi_hat_commutator_form");
  const ComplexMatrix hnl = h_nl(h, psi_hat);
  return kI * (hnl.adjoint() * x - x * hnl);
}

Complex mean_derivative(const ComplexMatrix& h, const ComplexMatrix& x,
                        const ComplexVector& psi_hat) {
  return mean_value(delta_psi_hat(h, x, psi_hat), psi_hat);
}

ClassificationReport classify(const ComplexMatrix& h, const ComplexMatrix& x,
                              const StateTrajectory& trajectory, double tol_class,
                              std::string name) {
  require_square(h, "classify");
  if (x.rows() != h.rows() || x.cols() != h.cols()) throw DimensionError("classify: X size");
  ClassificationReport rep;
  rep.observable_name = std::move(name);
  const ComplexMatrix dg = kI * (h.adjoint() * x - x * h);
  rep.in_c_gamma = dg.norm();
  for (const ComplexVector& v : trajectory.psi_hat) {
    const ComplexMatrix d = dg - kI * non_hermitian_scalar(h, v) * x;
    rep.in_c_psi_hat = std::max(rep.in_c_psi_hat, d.norm());
    rep.in_c_psi_hat_weak = std::max(rep.in_c_psi_hat_weak, std::abs(inner(v, d * v)));
  }
  rep.c_gamma = rep.in_c_gamma <= tol_class;
  rep.c_psi_hat = rep.in_c_psi_hat <= tol_class;
  rep.c_psi_hat_weak = rep.c_psi_hat || rep.in_c_psi_hat_weak <= tol_class;
  return rep;
}

ClassificationReport classify_ensemble(const ComplexMatrix& h, const ComplexMatrix& x,
                                       std::span<const ComplexVector> initial_states,
                                       std::span<const double> t_grid, double tol_class,
                                       std::string name) {
  if (initial_states.empty()) throw ValidationError("classify_ensemble: no initial states");
  ClassificationReport worst;
  worst.observable_name = name;
  for (const ComplexVector& psi0 : initial_states) {
    const ClassificationReport r = classify(h, x, exact_trajectory(h, psi0, t_grid), tol_class, name);
    worst.in_c_gamma = r.in_c_gamma;
    worst.in_c_psi_hat = std::max(worst.in_c_psi_hat, r.in_c_psi_hat);
    worst.in_c_psi_hat_weak = std::max(worst.in_c_psi_hat_weak, r.in_c_psi_hat_weak);
  }
  worst.c_gamma = worst.in_c_gamma <= tol_class;
  worst.c_psi_hat = worst.in_c_psi_hat <= tol_class;
  worst.c_psi_hat_weak = worst.c_psi_hat || worst.in_c_psi_hat_weak <= tol_class;
  return worst;
}

double gamma_symmetry_decay_check(const ComplexMatrix& h, const ComplexMatrix& x,
                                  const StateTrajectory& trajectory) {
  const GammaContext ctx(h);
  if (!is_gamma_symmetry(ctx, x)) {
    throw CertificationError("gamma_symmetry_decay_check: X is not a certified gamma-symmetry");
  }
  if (trajectory.size() == 0 || std::abs(trajectory.norm_sq.front() - 1.0) > 1e-12) {
    throw CertificationError("gamma_symmetry_decay_check: trajectory is not normalized at t = 0");
  }
  const Complex x0 = mean_value(x, trajectory.psi_hat.front());
  double worst = 0.0;
  for (std::size_t j = 0; j < trajectory.size(); ++j) {
    const Complex predicted = x0 / trajectory.norm_sq[j];
    worst = std::max(worst, std::abs(mean_value(x, trajectory.psi_hat[j]) - predicted));
  }
  return worst;
}

NecessaryConditionResult necessary_condition_residual(const ComplexMatrix& h,
                                                      const ComplexMatrix& x,
                                                      const StateTrajectory& trajectory,
                                                      Complex x0, double tol_class) {
  require_square(h, "necessary_condition_residual");
  const ComplexMatrix hd = h.adjoint();
  const ComplexMatrix dg = kI * (hd * x - x * h);
  const ComplexMatrix gap = hd - h;
  NecessaryConditionResult out;
  for (std::size_t j = 0; j < trajectory.size(); ++j) {
    const ComplexVector& psi = trajectory.psi[j];
    const Complex lhs = inner(psi, dg * psi);
    const Complex rhs = kI * x0 * inner(psi, gap * psi);
    out.max_residual = std::max(out.max_residual, std::abs(lhs - rhs));
    const ComplexVector& v = trajectory.psi_hat[j];
    const Complex weak = inner(v, delta_hat_with_scalar(h, x, non_hermitian_scalar(h, v)) * v);
    out.premise_residual = std::max(out.premise_residual, std::abs(weak));
  }
  out.premise_holds = out.premise_residual <= tol_class;
  return out;
}

FrozenSeries frozen_delta_series(const ComplexMatrix& h, const ComplexMatrix& x,
                                 const ComplexVector& psi_hat, double t, double tol_trunc,
                                 std::size_t cap) {
  require_compatible(h, x, psi_hat, "frozen_delta_series");
  require_unit(psi_hat, 1e-10, "frozen_delta_series");
  const Complex s = non_hermitian_scalar(h, psi_hat);
  const auto order =
      series_truncation_order(4.0 * op_norm(h) * std::abs(t), op_norm(x), tol_trunc, cap);
  if (!order) throw TruncationError("frozen_delta_series: truncation cap exceeded");

  FrozenSeries out;
  out.value = x;
  out.tail_bound = order->tail;
  out.partial_sum_norms.push_back(op_norm(out.value));
  out.increment_norms.push_back(op_norm(x));
  ComplexMatrix term = x;
  for (std::size_t k = 1; k <= order->order; ++k) {
    term = (t / static_cast<double>(k)) * delta_hat_with_scalar(h, term, s);
    out.value += term;
    out.partial_sum_norms.push_back(op_norm(out.value));
    out.increment_norms.push_back(op_norm(term));
  }
  return out;
}

FrozenGeneratorProbe probe_time_independent_generator(const ComplexMatrix& h,
                                                      const ComplexMatrix& x,
                                                      const StateTrajectory& trajectory,
                                                      double tol_trunc) {
  if (trajectory.size() == 0) throw ValidationError("probe: empty trajectory");
  FrozenGeneratorProbe probe;
  const Complex s0 = non_hermitian_scalar(h, trajectory.psi_hat.front());
  for (const ComplexVector& v : trajectory.psi_hat) {
    probe.scalar_variation = std::max(probe.scalar_variation, std::abs(non_hermitian_scalar(h, v) - s0));
  }
  const double t = trajectory.t_grid.back() - trajectory.t_grid.front();
  const FrozenSeries series = frozen_delta_series(h, x, trajectory.psi_hat.front(), t, tol_trunc);
  const ComplexMatrix hnl = h_nl(h, trajectory.psi_hat.front());
  const ComplexMatrix u = expm(Complex(0.0, -t) * hnl);
  probe.series_vs_conjugation = op_norm(series.value - u.adjoint() * x * u);
  return probe;
}

}  // namespace nhdyn
