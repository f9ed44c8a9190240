#include "nhdyn/fermion.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "nhdyn/errors.hpp"
#include "nhdyn/gamma.hpp"
#include "nhdyn/nonlinear_flow.hpp"

namespace nhdyn {
namespace {

ComplexMatrix single_mode_lowering() {
  ComplexMatrix s = ComplexMatrix::Zero(2, 2);
  s(0, 1) = 1.0;
  return s;
}

bool is_label(const Occupation& occ, std::initializer_list<int> pattern) {
  return occ.size() == pattern.size() && std::equal(occ.begin(), occ.end(), pattern.begin());
}

}  // namespace

ComplexMatrix CarAlgebra::total_number() const {
  ComplexMatrix total = ComplexMatrix::Zero(dim, dim);
  for (const auto& n : number_ops) total += n;
  return total;
}

Eigen::Index CarAlgebra::index_of(const Occupation& occ) const {
  if (static_cast<int>(occ.size()) != n_modes) {
    throw ValidationError("occupation label length does not match the number of modes");
  }
  Eigen::Index index = 0;
  for (int v : occ) {
    if (v != 0 && v != 1) throw ValidationError("occupation entries must be 0 or 1");
    index = 2 * index + v;
  }
  return index;
}

Occupation CarAlgebra::occupation_of(Eigen::Index index) const {
  Occupation occ(static_cast<std::size_t>(n_modes));
  for (int j = n_modes - 1; j >= 0; --j) {
    occ[static_cast<std::size_t>(j)] = static_cast<int>(index & 1);
    index >>= 1;
  }
  return occ;
}

ComplexVector CarAlgebra::vacuum() const {
  ComplexVector v = ComplexVector::Zero(dim);
  v(0) = 1.0;
  return v;
}

ComplexVector CarAlgebra::basis_state(const Occupation& occ) const {
  index_of(occ);  // validates
  ComplexVector v = vacuum();
  for (int mode = n_modes; mode >= 1; --mode) {
    if (occ[static_cast<std::size_t>(mode - 1)] == 1) v = b_dag(mode) * v;
  }
  return v;
}

CarAlgebra build_car(int n_modes) {
  if (n_modes < 1 || n_modes > 10) {
    throw ValidationError("build_car: n_modes must lie in [1, 10]");
  }
  CarAlgebra alg;
  alg.n_modes = n_modes;
  alg.dim = Eigen::Index{1} << n_modes;

  ComplexMatrix parity = ComplexMatrix::Zero(2, 2);
  parity(0, 0) = 1.0;
  parity(1, 1) = -1.0;
  const ComplexMatrix id2 = identity(2);
  const ComplexMatrix lower = single_mode_lowering();

  for (int mode = 1; mode <= n_modes; ++mode) {
    ComplexMatrix op = identity(1);
    for (int m = 1; m <= n_modes; ++m) {
      const ComplexMatrix& factor = m < mode ? parity : (m == mode ? lower : id2);
      op = kron(op, factor);
    }
    alg.number_ops.push_back(op.adjoint() * op);
    alg.lowering.push_back(std::move(op));
  }
  return alg;
}

double car_residual(const CarAlgebra& alg) {
  const ComplexMatrix id = identity(alg.dim);
  double worst = 0.0;
  auto track = [&worst](const ComplexMatrix& m) { worst = std::max(worst, m.cwiseAbs().maxCoeff()); };
  for (int k = 1; k <= alg.n_modes; ++k) {
    for (int j = 1; j <= alg.n_modes; ++j) {
      const ComplexMatrix anti = alg.b(k) * alg.b_dag(j) + alg.b_dag(j) * alg.b(k);
      track(k == j ? ComplexMatrix(anti - id) : anti);
      track(alg.b(k) * alg.b(j) + alg.b(j) * alg.b(k));
    }
    track(alg.b(k) * alg.b(k));
    track(alg.n(k) * alg.n(k) - alg.n(k));
    worst = std::max(worst, (alg.b(k) * alg.vacuum()).cwiseAbs().maxCoeff());
  }
  return worst;
}

Occupation parse_occupation(std::string_view label, int n_modes) {
  std::string_view digits = label;
  if (digits.rfind("phi", 0) == 0) digits.remove_prefix(3);
  if (!digits.empty() && digits.front() == '_') digits.remove_prefix(1);
  if (static_cast<int>(digits.size()) != n_modes) {
    std::ostringstream os;
    os << "occupation label '" << label << "' must have " << n_modes << " digits";
    throw ValidationError(os.str());
  }
  Occupation occ;
  for (char c : digits) {
    if (c != '0' && c != '1') {
      throw ValidationError("occupation label '" + std::string(label) + "' must contain only 0/1");
    }
    occ.push_back(c - '0');
  }
  return occ;
}

std::string occupation_label(const Occupation& occ) {
  std::string s = "phi";
  for (int v : occ) s.push_back(static_cast<char>('0' + v));
  return s;
}

DmModel::DmModel(double lambda, double mu, bool allow_zero)
    : algebra_(build_car(3)), lambda_(lambda), mu_(mu) {
  const bool ok = allow_zero ? (lambda >= 0.0 && mu >= 0.0) : (lambda > 0.0 && mu > 0.0);
  if (!ok || !std::isfinite(lambda) || !std::isfinite(mu)) {
    throw ValidationError("fermion_dm: lambda and mu must be positive");
  }
  h_ = algebra_.b_dag(1) * (lambda_ * algebra_.b(2) + mu_ * algebra_.b(3));
}

Occupations closed_form_occupations(const DmModel& model, const Occupation& initial, double t) {
  const double l2 = model.lambda() * model.lambda();
  const double m2 = model.mu() * model.mu();
  const double t2 = t * t;
  if (is_label(initial, {0, 1, 1})) {
    const double den = 1.0 + (l2 + m2) * t2;
    return {(l2 + m2) * t2 / den, (1.0 + m2 * t2) / den, (1.0 + l2 * t2) / den};
  }
  if (is_label(initial, {0, 1, 0})) {
    const double den = 1.0 + l2 * t2;
    return {l2 * t2 / den, 1.0 / den, 0.0};
  }
  throw ClosedFormUnavailable("no closed form for initial state " + occupation_label(initial) +
                              "; use simulate_occupations");
}

Complex closed_form_scalar_term(const DmModel& model, const Occupation& initial, double t) {
  const double l2 = model.lambda() * model.lambda();
  const double m2 = model.mu() * model.mu();
  // d/dt ||Psi||^2 = i <Psi, (H^dag - H) Psi> with ||Psi(t)||^2 = 1 + w t^2,
  // where w = ||H phi||^2, so the normalized scalar is -2 i w t / (1 + w t^2).
  double w = 0.0;
  if (is_label(initial, {0, 1, 1})) {
    w = l2 + m2;
  } else if (is_label(initial, {0, 1, 0})) {
    w = l2;
  } else {
    throw ClosedFormUnavailable("no closed-form scalar term for " + occupation_label(initial));
  }
  return Complex(0.0, -2.0 * w * t / (1.0 + w * t * t));
}

OccupationTrajectory simulate_occupations(const DmModel& model, const Occupation& initial,
                                          std::span<const double> t_grid) {
  const CarAlgebra& alg = model.algebra();
  const ComplexVector psi0 = alg.basis_state(initial);
  const StateTrajectory traj = exact_trajectory(model.h(), psi0, t_grid);

  bool has_closed_form = true;
  try {
    closed_form_occupations(model, initial, 0.0);
  } catch (const ClosedFormUnavailable&) {
    has_closed_form = false;
  }

  OccupationTrajectory out;
  out.rows.reserve(traj.size());
  if (has_closed_form) out.closed_form_deviation = 0.0;
  const ComplexMatrix id = identity(alg.dim);
  for (std::size_t j = 0; j < traj.size(); ++j) {
    const ComplexVector& v = traj.psi_hat[j];
    OccupationRow row;
    row.t = traj.t_grid[j];
    row.n.n1 = mean_value(alg.n(1), v).real();
    row.n.n2 = mean_value(alg.n(2), v).real();
    row.n.n3 = mean_value(alg.n(3), v).real();
    row.sum = row.n.sum();
    row.scalar = non_hermitian_scalar(model.h(), v);

    // H^2 = 0, so e^{-iHt} = 1 - iHt exactly.
    ComplexVector w = (id - Complex(0.0, row.t) * model.h()) * psi0;
    w /= w.norm();
    const double d = std::max({std::abs(mean_value(alg.n(1), w).real() - row.n.n1),
                               std::abs(mean_value(alg.n(2), w).real() - row.n.n2),
                               std::abs(mean_value(alg.n(3), w).real() - row.n.n3)});
    out.nilpotent_oracle_deviation = std::max(out.nilpotent_oracle_deviation, d);

    if (has_closed_form) {
      const Occupations cf = closed_form_occupations(model, initial, row.t);
      out.closed_form_deviation = std::max(
          {out.closed_form_deviation, std::abs(cf.n1 - row.n.n1), std::abs(cf.n2 - row.n.n2),
           std::abs(cf.n3 - row.n.n3)});
    }
    out.rows.push_back(row);
  }
  return out;
}

double delta_gamma_n_check(const DmModel& model) {
  const CarAlgebra& a = model.algebra();
  const ComplexMatrix id = identity(a.dim);
  const GammaContext ctx(model.h());
  const ComplexMatrix lhs = delta_gamma(ctx, a.total_number());
  const ComplexMatrix rhs =
      kI * model.lambda() * (a.b_dag(2) * a.b(1) - a.b_dag(1) * a.b(2)) * (id + a.n(3)) +
      kI * model.mu() * (a.b_dag(3) * a.b(1) - a.b_dag(1) * a.b(3)) * (id + a.n(2));
  return (lhs - rhs).norm();
}

double scalar_term_check(const DmModel& model, const Occupation& initial,
                         std::span<const double> t_grid) {
  closed_form_scalar_term(model, initial, 0.0);  // rejects unsupported labels up front
  const StateTrajectory traj =
      exact_trajectory(model.h(), model.algebra().basis_state(initial), t_grid);
  double worst = 0.0;
  for (std::size_t j = 0; j < traj.size(); ++j) {
    const Complex numeric = non_hermitian_scalar(model.h(), traj.psi_hat[j]);
    worst = std::max(worst, std::abs(numeric - closed_form_scalar_term(model, initial, traj.t_grid[j])));
  }
  return worst;
}

double nilpotent_propagator_residual(const DmModel& model, std::span<const double> t_grid) {
  const ComplexMatrix id = identity(model.algebra().dim);
  double worst = 0.0;
  for (double t : t_grid) {
    const ComplexMatrix u = expm(Complex(0.0, -t) * model.h());
    worst = std::max(worst, (u - (id - Complex(0.0, t) * model.h())).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace nhdyn
