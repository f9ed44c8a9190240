#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "nhdyn/errors.hpp"
#include "nhdyn/linalg.hpp"
#include "oracles.hpp"

using namespace nhdyn;

namespace {

ComplexMatrix m2(Complex a, Complex b, Complex c, Complex d) {
  ComplexMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

TEST(Expm, ZeroGivesIdentity) {
  EXPECT_EQ(expm(ComplexMatrix::Zero(3, 3)), identity(3));
}

TEST(Expm, RotationMatchesTaylorOracle) {
  const double theta = 0.3;
  const ComplexMatrix a = m2(0.0, theta, -theta, 0.0);
  const ComplexMatrix reference = oracle::taylor_expm(a);
  // Frozen from the oracle: cos 0.3 and sin 0.3.
  EXPECT_NEAR(reference(0, 0).real(), 0.95533648912560598, 1e-15);
  EXPECT_NEAR(reference(0, 1).real(), 0.29552020666133955, 1e-15);
  const ComplexMatrix expected = m2(std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta));
  EXPECT_LE((expm(a) - expected).norm(), 1e-15);
  EXPECT_LE((expm(a) - reference).norm(), 1e-15);
}

TEST(Expm, GroupInverseOnRandomMatrices) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    ComplexMatrix a = oracle::random_matrix(rng, 4, 4);
    a *= 2.0 / op_norm(a);
    EXPECT_LE((expm(a) * expm(-a) - identity(4)).norm(), 1e-12);
    EXPECT_LE((expm(a) - oracle::taylor_expm(a)).norm(), 1e-12);
  }
}

TEST(Expm, RejectsNonSquareAndNonFinite) {
  EXPECT_THROW(expm(ComplexMatrix::Zero(2, 3)), DimensionError);
  ComplexMatrix bad = identity(2);
  bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(expm(bad), NumericRangeError);
}

TEST(EigGeneral, DiagonalMatrix) {
  ComplexMatrix d = ComplexMatrix::Zero(3, 3);
  d.diagonal() << 3.0, 1.0, 2.0;
  const Spectrum s = eig_general(d);
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(std::abs(s.eigenvalues(k) - Complex(k + 1.0)), 0.0, 1e-14);
    // Standard basis up to a phase.
    EXPECT_NEAR(std::abs(s.right_vectors(k == 0 ? 1 : (k == 1 ? 2 : 0), k)), 1.0, 1e-14);
  }
}

TEST(EigGeneral, DefectiveMatrixReportsLargeCondition) {
  const Spectrum s = eig_general(m2(0.0, 1.0, 0.0, 0.0));
  // Characteristic polynomial lambda^2 = 0.
  EXPECT_LE(std::abs(s.eigenvalues(0)), 1e-12);
  EXPECT_LE(std::abs(s.eigenvalues(1)), 1e-12);
  EXPECT_GT(s.condition_estimate, 1e8);
}

TEST(EigGeneral, UpperTriangularHandSolve) {
  const ComplexMatrix a = m2(1.0, 1.0, 0.0, 2.0);
  const Spectrum s = eig_general(a);
  EXPECT_NEAR(std::abs(s.eigenvalues(0) - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(s.eigenvalues(1) - 2.0), 0.0, 1e-14);
  // (A - 2I) v = 0 gives v proportional to (1, 1).
  const ComplexVector v = s.right_vectors.col(1);
  EXPECT_NEAR(std::abs(v(0) - v(1)), 0.0, 1e-14);
  EXPECT_NEAR(v.norm(), 1.0, 1e-14);
}

TEST(EigGeneral, ResidualInvariantOnRandomMatrices) {
  std::mt19937_64 rng(11);
  for (int n : {1, 3, 6, 10}) {
    const ComplexMatrix a = oracle::random_matrix(rng, n, n);
    const Spectrum s = eig_general(a);
    for (int k = 0; k < n; ++k) {
      EXPECT_LE((a * s.right_vectors.col(k) - s.eigenvalues(k) * s.right_vectors.col(k)).norm(),
                1e-10 * op_norm(a));
      EXPECT_NEAR(s.right_vectors.col(k).norm(), 1.0, 1e-13);
      if (k > 0) EXPECT_LE(s.eigenvalues(k - 1).real(), s.eigenvalues(k).real());
    }
  }
}

TEST(Nullspace, FullRankGivesNoColumns) { EXPECT_EQ(nullspace(identity(3)).cols(), 0); }

TEST(Nullspace, ZeroMatrixGivesWholeSpace) {
  const ComplexMatrix k = nullspace(ComplexMatrix::Zero(2, 3));
  ASSERT_EQ(k.cols(), 3);
  EXPECT_LE((k.adjoint() * k - identity(3)).norm(), 1e-14);
}

TEST(Nullspace, CoordinateKernel) {
  ComplexMatrix l = ComplexMatrix::Zero(2, 3);
  l(0, 0) = 1.0;
  l(1, 1) = 1.0;
  const ComplexMatrix k = nullspace(l);
  ASSERT_EQ(k.cols(), 1);
  EXPECT_NEAR(std::abs(k(2, 0)), 1.0, 1e-14);
  EXPECT_LE((l * k).norm(), 1e-14);
}

TEST(Nullspace, RejectsToleranceOutsideUnitInterval) {
  EXPECT_THROW(nullspace(identity(2), 0.0), ValidationError);
  EXPECT_THROW(nullspace(identity(2), 1.0), ValidationError);
}

TEST(Nullspace, MatchesLuRankOnRandomLowRank) {
  std::mt19937_64 rng(3);
  const ComplexMatrix l = oracle::random_matrix(rng, 6, 3) * oracle::random_matrix(rng, 3, 8);
  const ComplexMatrix k = nullspace(l);
  EXPECT_EQ(k.cols(), 5);
  EXPECT_LE((l * k).norm(), 1e-12 * l.norm());
  EXPECT_LE((k.adjoint() * k - identity(5)).norm(), 1e-13);
}

TEST(Kron, IdentityTimesIdentity) { EXPECT_EQ(kron(identity(2), identity(2)), identity(4)); }

TEST(Kron, BlockStructure) {
  const ComplexMatrix k = kron(m2(0.0, 1.0, 0.0, 0.0), identity(2));
  ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
  expected.block(0, 2, 2, 2) = identity(2);
  EXPECT_EQ(k, expected);
}

TEST(Kron, VecIdentityOnRandomTriples) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix a = oracle::random_matrix(rng, 3, 3);
    const ComplexMatrix x = oracle::random_matrix(rng, 3, 3);
    const ComplexMatrix b = oracle::random_matrix(rng, 3, 3);
    const ComplexVector lhs = vec(a * x * b);
    const ComplexVector rhs = kron(b.transpose(), a) * vec(x);
    EXPECT_LE((lhs - rhs).norm(), 1e-13 * lhs.norm());
  }
}

TEST(Kron, EntryCapThrows) {
  EXPECT_THROW(kron(identity(20), identity(20), 1000.0), DimensionError);
}

TEST(Vec, RoundTrip) {
  std::mt19937_64 rng(9);
  const ComplexMatrix x = oracle::random_matrix(rng, 3, 3);
  EXPECT_EQ(unvec(vec(x), 3, 3), x);
  EXPECT_EQ(vec(x)(1), x(1, 0));  // column stacking
}

TEST(OpNorm, Examples) {
  EXPECT_NEAR(op_norm(identity(5)), 1.0, 1e-15);
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = Complex(0.0, -4.0);
  EXPECT_NEAR(op_norm(d), 4.0, 1e-14);
  // sigma_max of [[0,2],[0,0]] from A^H A = diag(0, 4).
  EXPECT_NEAR(op_norm(m2(0.0, 2.0, 0.0, 0.0)), 2.0, 1e-14);
}

TEST(Inner, ConjugateLinearInFirstArgument) {
  ComplexVector f(2), g(2);
  f << Complex(0, 1), 0.0;
  g << 1.0, 0.0;
  EXPECT_EQ(inner(f, g), Complex(0, -1));
  EXPECT_EQ(inner(g, f), Complex(0, 1));
}
