#include "opint/spectral.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace opint;

namespace {

Matrix diag(std::initializer_list<double> v) {
  RealVector d(v.size());
  Eigen::Index i = 0;
  for (double x : v) d[i++] = x;
  return d.cast<Complex>().asDiagonal();
}

}  // namespace

TEST(HermitianMatrix, RejectsNonHermitianNamingPair) {
  Matrix m(2, 2);
  m << 1.0, Complex(2.0, 1.0), Complex(2.0, 1.0), 3.0;
  try {
    HermitianMatrix h(m);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("(0,1)"), std::string::npos) << e.what();
  }
}

TEST(HermitianMatrix, RejectsEmptyAndNonSquare) {
  EXPECT_THROW(HermitianMatrix(Matrix(0, 0)), ValidationError);
  EXPECT_THROW(HermitianMatrix(Matrix::Zero(2, 3)), ValidationError);
}

TEST(HermitianMatrix, ToleratesRoundoffAsymmetry) {
  Matrix m(2, 2);
  m << 1.0, Complex(2.0, 1.0), Complex(2.0 + 1e-15, -1.0), 3.0;
  EXPECT_NO_THROW(HermitianMatrix{m});
}

TEST(Eigendecompose, DiagonalInput) {
  const auto eig = eigendecompose(HermitianMatrix(diag({2.0, -1.0})));
  EXPECT_DOUBLE_EQ(eig.eigenvalues[0], -1.0);
  EXPECT_DOUBLE_EQ(eig.eigenvalues[1], 2.0);
  EXPECT_NEAR(std::abs(eig.eigenvectors(1, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(eig.eigenvectors(0, 1)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(eig.eigenvectors(0, 0)), 0.0, 1e-15);
}

TEST(Eigendecompose, PauliX) {
  Matrix x(2, 2);
  x << 0.0, 1.0, 1.0, 0.0;
  const auto eig = eigendecompose(HermitianMatrix(x));
  EXPECT_NEAR(eig.eigenvalues[0], -1.0, 1e-15);
  EXPECT_NEAR(eig.eigenvalues[1], 1.0, 1e-15);
}

TEST(Eigendecompose, RandomReconstruction) {
  const auto h = random_hermitian(16, Ensemble::gue(), 0.0, 2024);
  const auto eig = eigendecompose(h);
  const double rho = spectral_radius(eig.eigenvalues);
  const Matrix v = eig.eigenvectors;
  const Matrix rec = v * eig.eigenvalues.cast<Complex>().asDiagonal() * v.adjoint();
  EXPECT_LE((rec - h.matrix()).cwiseAbs().maxCoeff(), 1e-11 * rho);
  EXPECT_LE((v.adjoint() * v - Matrix::Identity(16, 16)).cwiseAbs().maxCoeff(), 1e-11);
  for (Eigen::Index i = 1; i < 16; ++i) EXPECT_LE(eig.eigenvalues[i - 1], eig.eigenvalues[i]);
}

TEST(SpectralMeasure, ExactDegeneracy) {
  const auto e = spectral_measure(HermitianMatrix(diag({1.0, 1.0, 2.0})), 0.0);
  ASSERT_EQ(e.size(), 2u);
  EXPECT_DOUBLE_EQ(e.point(0), 1.0);
  EXPECT_DOUBLE_EQ(e.point(1), 2.0);
  EXPECT_EQ(e.rank(0), 2);
  EXPECT_EQ(e.rank(1), 1);
}

TEST(SpectralMeasure, ForcedMerge) {
  const auto e = spectral_measure(HermitianMatrix(diag({0.0, 1e-14, 1.0})), 1e-10);
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e.rank(0), 2);
  EXPECT_NEAR(e.point(0), 0.5e-14, 1e-16);
}

TEST(SpectralMeasure, GapEnforcedSingletons) {
  const auto h = random_hermitian(8, Ensemble::gue(), 1e-3, 5);
  const auto e = spectral_measure(h, 1e-8);
  EXPECT_EQ(e.size(), 8u);
}

TEST(SpectralMeasure, RejectsNegativeTolerance) {
  EXPECT_THROW(spectral_measure(HermitianMatrix(diag({1.0})), -1.0), ValidationError);
}

TEST(SpectralMeasure, InvariantsOn200Seeds) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Eigen::Index dim = 1 + static_cast<Eigen::Index>(seed % 12);
    // Every fourth seed has a degenerate block to exercise clustering.
    Matrix m = random_hermitian(dim, Ensemble::gue(), 0.0, seed).matrix();
    if (seed % 4 == 0 && dim >= 3) {
      const Matrix u = random_unitary(dim, seed + 1000);
      RealVector lam = RealVector::LinSpaced(dim, -1.0, 1.0);
      lam[1] = lam[0];
      m = detail::compose(u, lam);
    }
    const HermitianMatrix h(m);
    const auto e = spectral_measure(h);
    const auto ps = e.projections();
    Matrix total = Matrix::Zero(dim, dim);
    for (std::size_t i = 0; i < ps.size(); ++i) {
      EXPECT_LE((ps[i] - ps[i].adjoint()).cwiseAbs().maxCoeff(), 1e-10);
      EXPECT_LE((ps[i] * ps[i] - ps[i]).cwiseAbs().maxCoeff(), 1e-10);
      for (std::size_t j = i + 1; j < ps.size(); ++j) EXPECT_LE((ps[i] * ps[j]).cwiseAbs().maxCoeff(), 1e-10);
      total += ps[i];
      if (i > 0) EXPECT_LT(e.point(i - 1), e.point(i));
    }
    EXPECT_LE((total - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff(), 1e-10);
    const double rho = std::max(1.0, m.cwiseAbs().maxCoeff() * dim);
    EXPECT_LE((e.reconstruct() - m).cwiseAbs().maxCoeff(), 1e-10 * rho);
  }
}

TEST(SchattenNorm, DiagonalValues) {
  const Matrix d = diag({3.0, -4.0});
  EXPECT_NEAR(schatten_norm(d, SchattenIndex(1.0)), 7.0, 1e-14);
  EXPECT_NEAR(schatten_norm(d, SchattenIndex(2.0)), 5.0, 1e-14);
  EXPECT_NEAR(schatten_norm(d, SchattenIndex::infinity()), 4.0, 1e-14);
  EXPECT_NEAR(schatten_norm(d, SchattenIndex(3.0)), std::cbrt(27.0 + 64.0), 1e-13);
}

TEST(SchattenNorm, RankOne) {
  const Matrix u = oracle::random_complex(5, 1, 1);
  const Matrix v = oracle::random_complex(5, 1, 2);
  const double expected = u.norm() * v.norm();
  for (double p : {1.0, 1.5, 2.0, 7.0})
    EXPECT_NEAR(schatten_norm(u * v.adjoint(), SchattenIndex(p)), expected, 1e-12 * expected);
  EXPECT_NEAR(schatten_norm(u * v.adjoint(), SchattenIndex::infinity()), expected, 1e-12 * expected);
}

TEST(SchattenNorm, RejectsPBelowOne) {
  EXPECT_THROW(SchattenIndex(0.5), ValidationError);
  EXPECT_THROW(SchattenIndex(std::nan("")), ValidationError);
}

TEST(SchattenNorm, ZeroMatrix) { EXPECT_EQ(schatten_norm(Matrix::Zero(3, 3), SchattenIndex(1.5)), 0.0); }

TEST(RandomHermitian, Deterministic) {
  const auto a = random_hermitian(4, Ensemble::gue(), 0.0, 7);
  const auto b = random_hermitian(4, Ensemble::gue(), 0.0, 7);
  EXPECT_EQ(a.matrix(), b.matrix());
  const auto c = random_hermitian(4, Ensemble::gue(), 0.0, 8);
  EXPECT_NE(a.matrix(), c.matrix());
}

TEST(RandomHermitian, SpreadSpectrumGaps) {
  const auto h = random_hermitian(3, Ensemble::spread(100.0), 1.0, 1);
  const auto lam = eigendecompose(h).eigenvalues;
  for (Eigen::Index i = 1; i < lam.size(); ++i) EXPECT_GE(lam[i] - lam[i - 1], 1.0);
  EXPECT_GE(lam[0], -100.0 - 1e-9);
  EXPECT_LE(lam[2], 100.0 + 1e-9);
}

TEST(RandomHermitian, GueGapsRespaced) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto lam = eigendecompose(random_hermitian(32, Ensemble::gue(), 0.05, seed)).eigenvalues;
    for (Eigen::Index i = 1; i < lam.size(); ++i) EXPECT_GE(lam[i] - lam[i - 1], 0.05);
  }
}

TEST(RandomHermitian, DimensionOne) {
  const auto h = random_hermitian(1, Ensemble::spread(2.0), 0.0, 3);
  ASSERT_EQ(h.dim(), 1);
  EXPECT_EQ(h.matrix()(0, 0).imag(), 0.0);
  EXPECT_LE(std::abs(h.matrix()(0, 0).real()), 2.0);
}

TEST(RandomHermitian, InfeasibleGap) {
  EXPECT_THROW(random_hermitian(10, Ensemble::spread(1.0), 1.0, 0), ValidationError);
  EXPECT_THROW(random_hermitian(0, Ensemble::gue(), 0.0, 0), ValidationError);
  EXPECT_THROW(random_hermitian(3, Ensemble::gue(), -1.0, 0), ValidationError);
}

TEST(PrescribedPerturbation, TargetsAreHit) {
  const auto h = random_hermitian(6, Ensemble::gue(), 0.0, 11);
  const auto a = prescribed_perturbation(h, SchattenIndex(1.0), 0.5, 3);
  EXPECT_NEAR(schatten_norm(a.difference(), SchattenIndex(1.0)), 0.5, 5e-13);
  EXPECT_NEAR(a.perturbation_norm, 0.5, 5e-13);
  const auto b = prescribed_perturbation(h, SchattenIndex::infinity(), 1.0, 3);
  EXPECT_NEAR(schatten_norm(b.difference(), SchattenIndex::infinity()), 1.0, 1e-12);
  const auto c = prescribed_perturbation(h, SchattenIndex(1.0), 0.5, 3);
  EXPECT_EQ(a.perturbed.matrix(), c.perturbed.matrix());
  EXPECT_THROW(prescribed_perturbation(h, SchattenIndex(1.0), 0.0, 3), ValidationError);
}

TEST(PrescribedPerturbation, RecordedNormMatchesDifference) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto h = random_hermitian(12, Ensemble::spread(1e3), 0.0, seed);
    const auto pp = prescribed_perturbation(h, SchattenIndex(1.5), 0.25, seed);
    EXPECT_NEAR(schatten_norm(pp.difference(), pp.p), pp.perturbation_norm, 1e-10 * pp.perturbation_norm);
  }
}

// Property checks on Schatten norms.
class SchattenProperties : public ::testing::TestWithParam<double> {};

TEST_P(SchattenProperties, UnitaryInvarianceTriangleHolder) {
  const SchattenIndex p(GetParam());
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(seed % 9);
    const Matrix m = oracle::random_complex(n, n, seed);
    const Matrix k = oracle::random_complex(n, n, seed + 7777);
    const Matrix u = random_unitary(n, seed + 1);
    const Matrix v = random_unitary(n, seed + 2);
    const double nm = schatten_norm(m, p);
    EXPECT_NEAR(schatten_norm(u * m * v, p), nm, 1e-10 * nm);
    EXPECT_LE(schatten_norm(m + k, p), nm + schatten_norm(k, p) + 1e-10);
    EXPECT_LE(schatten_norm(m * k, SchattenIndex(1.0)),
              schatten_norm(m, SchattenIndex(2.0)) * schatten_norm(k, SchattenIndex(2.0)) + 1e-10);
    EXPECT_GE(schatten_norm(m, SchattenIndex(1.0)) + 1e-12, nm);
    EXPECT_LE(schatten_norm(m, SchattenIndex::infinity()), nm + 1e-12);
  }
}

INSTANTIATE_TEST_SUITE_P(Indices, SchattenProperties, ::testing::Values(1.0, 1.25, 1.5, 2.0, 3.0, 8.0));
