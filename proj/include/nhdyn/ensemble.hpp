#pragma once

// Seeded random operators for property suites and CLI ensembles.
// Hamiltonians are V diag(E) V^{-1} with controlled spectrum and cond(V).

#include <cstdint>
#include <random>

#include "nhdyn/linalg.hpp"

namespace nhdyn {

using Rng = std::mt19937_64;

enum class SpectrumKind {
  kHermitian,         // V unitary, E real
  kRealNonHermitian,  // cond(V) > 1, E real and distinct
  kComplex,           // cond(V) > 1, at least one E with Im E != 0
};

struct HamiltonianSample {
  ComplexMatrix h;
  ComplexVector spectrum;
  ComplexMatrix v;
  double v_condition = 1.0;
};

ComplexMatrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale = 1.0);
ComplexMatrix random_unitary(Rng& rng, Eigen::Index n);
ComplexMatrix random_hermitian(Rng& rng, Eigen::Index n, double scale = 1.0);
ComplexVector random_unit_vector(Rng& rng, Eigen::Index n);

// Eigenvalues are spread over [-1, 1] with spacing at least 1/n; for
// kComplex they also get imaginary parts in [-0.5, 0.5]. v_condition is
// the exact 2-norm condition number of V (ignored for kHermitian).
HamiltonianSample random_hamiltonian(Rng& rng, Eigen::Index n, SpectrumKind kind,
                                     double v_condition = 4.0);

}  // namespace nhdyn
