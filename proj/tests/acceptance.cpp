// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "nhdyn/biortho.hpp"
#include "nhdyn/eigenstate.hpp"
#include "nhdyn/ensemble.hpp"
#include "nhdyn/fermion.hpp"
#include "nhdyn/gamma.hpp"
#include "nhdyn/nonlinear_flow.hpp"

using namespace nhdyn;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

ComplexMatrix unit_op_norm(ComplexMatrix x) { return x / op_norm(x); }

// Trajectories shared by the sum-rule and identity-classification criteria.
struct SuiteTrajectory {
  ComplexMatrix h;
  StateTrajectory traj;
};

std::vector<SuiteTrajectory> build_suite() {
  std::vector<SuiteTrajectory> suite;
  const auto grid = uniform_grid(0.0, 10.0, 201);
  for (const auto& [lambda, mu] : {std::pair{1.0, 1.0}, std::pair{2.0, 0.5}}) {
    const DmModel model(lambda, mu);
    for (const Occupation& occ : {Occupation{0, 1, 1}, Occupation{0, 1, 0}}) {
      suite.push_back({model.h(), exact_trajectory(model.h(), model.algebra().basis_state(occ), grid)});
    }
  }
  Rng rng(2024);
  const auto short_grid = uniform_grid(0.0, 3.0, 201);
  for (int i = 0; i < 10; ++i) {
    const SpectrumKind kind = i % 2 == 0 ? SpectrumKind::kRealNonHermitian : SpectrumKind::kComplex;
    const ComplexMatrix h = random_hamiltonian(rng, 2 + i % 7, kind, 3.0).h;
    suite.push_back({h, exact_trajectory(h, random_unit_vector(rng, h.rows()), short_grid)});
  }
  return suite;
}

Outcome closed_form_occupations_criterion() {
  const auto start = std::chrono::steady_clock::now();
  const DmModel model(1.0, 1.0);
  const auto grid = uniform_grid(0.0, 10.0, 201);
  const OccupationTrajectory occ = simulate_occupations(model, {0, 1, 1}, grid);
  double worst = 0.0;
  for (const auto& row : occ.rows) {
    const double t2 = row.t * row.t;
    const double den = 1.0 + 2.0 * t2;
    worst = std::max({worst, std::abs(row.n.n1 - 2.0 * t2 / den), std::abs(row.n.n2 - (1.0 + t2) / den),
                      std::abs(row.n.n3 - (1.0 + t2) / den)});
  }
  const double elapsed = seconds_since(start);
  return {worst <= 1e-11 && elapsed < 1.0 && occ.rows.size() == 201,
          fmt("max |n_j - closed form| = %.2e (<= 1e-11), runtime %.3f s (< 1 s)", worst, elapsed)};
}

Outcome conservation_criterion() {
  const auto start = std::chrono::steady_clock::now();
  const auto grid = uniform_grid(0.0, 10.0, 201);
  std::vector<std::pair<double, double>> params{{1.0, 1.0}};
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int i = 0; i < 20; ++i) {
    double l = u(rng), m = u(rng);
    if (l == 0.0) l = 3.0;  // (0, 3]
    if (m == 0.0) m = 3.0;
    params.emplace_back(l, m);
  }
  double worst = 0.0;
  for (const auto& [l, m] : params) {
    const DmModel model(l, m);
    for (const auto& row : simulate_occupations(model, {0, 1, 1}, grid).rows) worst = std::max(worst, std::abs(row.sum - 2.0));
    for (const auto& row : simulate_occupations(model, {0, 1, 0}, grid).rows) worst = std::max(worst, std::abs(row.sum - 1.0));
  }
  const double elapsed = seconds_since(start);
  return {worst <= 1e-10 && elapsed < 5.0,
          fmt("max |sum - const| = %.2e (<= 1e-10) over 21 couplings x 2 states, runtime %.3f s (< 5 s)",
              worst, elapsed)};
}

Outcome number_operator_identity_criterion() {
  std::mt19937_64 rng(45);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) worst = std::max(worst, delta_gamma_n_check(DmModel(u(rng), u(rng))));
  return {worst <= 1e-12, fmt("max ||delta_gamma(N) - RHS||_F = %.2e (<= 1e-12) over 10 couplings", worst)};
}

Outcome series_equals_conjugation_criterion() {
  Rng rng(46);
  double worst = 0.0;
  int checks = 0;
  for (SpectrumKind kind : {SpectrumKind::kHermitian, SpectrumKind::kRealNonHermitian, SpectrumKind::kComplex}) {
    for (Eigen::Index n = 2; n <= 8; n += 3) {
      const HamiltonianSample s = random_hamiltonian(rng, n, kind, 3.0);
      std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
      const EigenstateContext ctx(s.h, pick(rng));
      for (int i = 0; i < 20; ++i) {
        const ComplexMatrix x = unit_op_norm(random_matrix(rng, n, n));
        for (double t : {0.25, 0.5, 1.0, 2.0}) {
          worst = std::max(worst, op_norm(beta_series(ctx, x, t).value - gamma_hat(ctx, x, t)));
          ++checks;
        }
      }
    }
  }
  return {worst <= 1e-10, fmt("max ||beta^t(X) - gamma_hat^t(X)|| = %.2e (<= 1e-10) over %.0f cases", worst, checks)};
}

Outcome symmetry_equivalence_criterion() {
  std::vector<ComplexMatrix> hams{DmModel(1.0, 1.0).h()};
  Rng rng(47);
  for (Eigen::Index n : {2, 3, 4, 6}) hams.push_back(random_hamiltonian(rng, n, SpectrumKind::kRealNonHermitian, 3.0).h);
  hams.push_back(random_hamiltonian(rng, 4, SpectrumKind::kHermitian).h);
  double fixed = 0.0, derivation = 0.0;
  int members = 0;
  for (const ComplexMatrix& h : hams) {
    const GammaContext ctx(h);
    for (const ComplexMatrix& x : gamma_symmetry_basis(ctx).generators) {
      for (const ComplexMatrix& raw : symmetry_chain(ctx, x)) {
        if (raw.norm() < 1e-12) continue;  // X H^k = 0 is trivially fixed
        const ComplexMatrix m = raw / raw.norm();
        ++members;
        derivation = std::max(derivation, delta_gamma(ctx, m).norm());
        for (double t : {0.5, 1.0, 2.0}) fixed = std::max(fixed, op_norm(gamma_t(ctx, m, t) - m));
      }
    }
  }
  return {fixed <= 1e-8 && derivation <= 1e-9 && members > 0,
          fmt("max ||gamma^t(X) - X|| = %.2e (<= 1e-8), max ||delta_gamma(X)|| = %.2e (<= 1e-9), %.0f chain members",
              fixed, derivation, members)};
}

Outcome automorphism_dichotomy_criterion() {
  Rng rng(48);
  double herm_worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const Eigen::Index n = 2 + i % 5;
    const GammaContext ctx(random_hermitian(rng, n));
    for (int p = 0; p < 5; ++p) {
      const ComplexMatrix x = random_matrix(rng, n, n), y = random_matrix(rng, n, n);
      for (double t : {0.5, 1.0, 2.0}) {
        const double d = op_norm(gamma_t(ctx, x * y, t) - gamma_t(ctx, x, t) * gamma_t(ctx, y, t));
        herm_worst = std::max(herm_worst, d / (op_norm(x) * op_norm(y)));
      }
    }
  }
  double witness_min = INFINITY;
  for (int i = 0; i < 10; ++i) {
    const Eigen::Index n = 2 + i % 5;
    const SpectrumKind kind = i % 2 == 0 ? SpectrumKind::kRealNonHermitian : SpectrumKind::kComplex;
    const GammaContext ctx(random_hamiltonian(rng, n, kind, 3.0).h);
    witness_min = std::min(witness_min, op_norm(gamma_t(ctx, identity(n), 1.0) - identity(n)));
  }
  return {herm_worst <= 1e-9 && witness_min > 1e-4,
          fmt("Hermitian max multiplicativity defect = %.2e (<= 1e-9), non-Hermitian min ||gamma^1(1) - 1|| = %.2e (> 1e-4)",
              herm_worst, witness_min)};
}

Outcome sum_rule_criterion(const std::vector<SuiteTrajectory>& suite) {
  double worst = 0.0;
  std::size_t points = 0;
  for (const auto& s : suite) {
    const ComplexMatrix herm = s.h + s.h.adjoint();
    for (const auto& v : s.traj.psi_hat) {
      const ComplexMatrix hnl = h_nl(s.h, v);
      worst = std::max(worst, (hnl + hnl.adjoint() - herm).norm());
      ++points;
    }
  }
  return {worst <= 1e-13,
          fmt("max ||H_nl + H_nl^dag - (H + H^dag)|| = %.2e (<= 1e-13) over %.0f grid points", worst,
              static_cast<double>(points))};
}

Outcome decay_law_criterion() {
  const DmModel model(1.0, 1.0);
  const auto traj = exact_trajectory(model.h(), model.algebra().basis_state({0, 1, 1}), uniform_grid(0.0, 10.0, 201));
  const SymmetryBasis basis = gamma_symmetry_basis(GammaContext(model.h()));
  double worst = 0.0;
  for (const ComplexMatrix& x : basis.generators) {
    const Complex x0 = mean_value(x, traj.psi_hat.front());
    for (std::size_t j = 0; j < traj.size(); ++j) {
      const double t = traj.t_grid[j];
      worst = std::max(worst, std::abs(mean_value(x, traj.psi_hat[j]) - x0 / (1.0 + 2.0 * t * t)));
    }
  }
  return {worst <= 1e-9 && !basis.generators.empty(),
          fmt("max |x(t) - x(0)/(1+2t^2)| = %.2e (<= 1e-9) over %.0f symmetries", worst,
              static_cast<double>(basis.generators.size()))};
}

Outcome richardson_criterion() {
  const DmModel model(1.0, 1.0);
  const ComplexVector psi0 = model.algebra().basis_state({0, 1, 1});
  const auto grid = uniform_grid(0.0, 5.0, 51);
  const double coarse = integrate_nonlinear(model.h(), psi0, grid, 1).max_deviation;
  const double fine = integrate_nonlinear(model.h(), psi0, grid, 2).max_deviation;
  const double ratio = coarse / fine;
  return {ratio > 12.0 && ratio < 20.0,
          fmt("max_deviation %.3e (dt = 0.1) / %.3e (dt = 0.05) = %.2f, in (12, 20)", coarse, fine, ratio)};
}

Outcome similarity_criterion() {
  Rng rng(50);
  const auto grid = uniform_grid(0.0, 5.0, 101);
  double preserved = 0.0, control = INFINITY;
  for (int i = 0; i < 5; ++i) {
    const Eigen::Index n = 2 + i;
    // H0 = U diag U^dag, R = W U diag(p) U^dag, so R^dag R = U diag(p^2) U^dag commutes with H0.
    const ComplexMatrix u = random_unitary(rng, n);
    Eigen::VectorXd e(n), p(n);
    std::uniform_real_distribution<double> ue(-1.0, 1.0), up(0.5, 2.0);
    for (Eigen::Index k = 0; k < n; ++k) {
      e(k) = ue(rng);
      p(k) = up(rng);
    }
    const ComplexMatrix h0 = u * e.cast<Complex>().asDiagonal() * u.adjoint();
    const ComplexMatrix r = random_unitary(rng, n) * u * p.cast<Complex>().asDiagonal() * u.adjoint();
    const SimilarityResult good = similar_norm_preserving(h0, r);
    preserved = std::max(preserved, identity_drift(GammaContext(good.h), grid));

    const ComplexMatrix r_bad = random_matrix(rng, n, n) + 2.0 * identity(n);
    const SimilarityResult bad = similar_norm_preserving(h0, r_bad);
    control = std::min(control, identity_drift(GammaContext(bad.h), grid));
  }
  return {preserved <= 1e-9 && control > 1e-3,
          fmt("commuting metric: sup_t ||gamma^t(1) - 1|| = %.2e (<= 1e-9); non-commuting control min variation = %.2e (> 1e-3)",
              preserved, control)};
}

Outcome biortho_criterion() {
  Rng rng(51);
  std::mt19937_64 vrng(52);
  double worst_ratio = 0.0, worst_kappa = 0.0;
  for (Eigen::Index n : {2, 4, 8, 12, 16}) {
    for (int i = 0; i < 4; ++i) {
      const HamiltonianSample s = random_hamiltonian(rng, n, SpectrumKind::kRealNonHermitian, 2.0 + 3.0 * i);
      const BiorthogonalSystem sys = build_biorthogonal(s.h);
      const IntertwiningResidual inter = verify_intertwining(sys, s.h);
      const BiorthoDiagnostics d = diagnose(sys);
      double residual = std::max({inter.s_psi, inter.s_phi, d.biorthogonality, d.resolution, d.metric_inverse});
      for (int k = 0; k < 10; ++k) {
        const ExpansionResidual e = expansion_residual(sys, random_unit_vector(vrng, n));
        residual = std::max({residual, e.via_phi_coefficients, e.via_psi_coefficients});
      }
      worst_ratio = std::max(worst_ratio, residual / (1e-8 * sys.condition));
      worst_kappa = std::max(worst_kappa, sys.condition);
    }
  }
  return {worst_ratio <= 1.0,
          fmt("max residual / (1e-8 kappa(V)) = %.2e (<= 1) over dims 2..16, max kappa = %.1f", worst_ratio, worst_kappa)};
}

Outcome identity_classification_criterion(const std::vector<SuiteTrajectory>& suite) {
  double weak_worst = 0.0, strong_min = INFINITY;
  for (const auto& s : suite) {
    if (GammaContext(s.h).is_hermitian()) continue;
    const ClassificationReport r = classify(s.h, identity(s.h.rows()), s.traj, 1e-8, "identity");
    weak_worst = std::max(weak_worst, r.in_c_psi_hat_weak);
    strong_min = std::min(strong_min, r.in_c_psi_hat);
  }
  return {weak_worst <= 1e-10 && strong_min > 1e-3,
          fmt("weak residual max = %.2e (<= 1e-10), strong residual min = %.2e (> 1e-3)", weak_worst, strong_min)};
}

}  // namespace

int main() {
  const std::vector<SuiteTrajectory> suite = build_suite();
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"closed-form occupations", closed_form_occupations_criterion},
      {"occupation-sum conservation", conservation_criterion},
      {"number-operator derivation identity", number_operator_identity_criterion},
      {"eigenstate series equals conjugation", series_equals_conjugation_criterion},
      {"gamma-symmetry equivalences", symmetry_equivalence_criterion},
      {"automorphism dichotomy", automorphism_dichotomy_criterion},
      {"nonlinear Hamiltonian sum rule", [&] { return sum_rule_criterion(suite); }},
      {"gamma-symmetry decay law", decay_law_criterion},
      {"integrator Richardson ratio", richardson_criterion},
      {"norm-preserving similarity", similarity_criterion},
      {"biorthogonal completeness and intertwining", biortho_criterion},
      {"identity is a strictly weak integral", [&] { return identity_classification_criterion(suite); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
