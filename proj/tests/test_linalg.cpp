#include <gtest/gtest.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "support/svd_oracle.hpp"
#include "vproj/finite_diff.hpp"
#include "vproj/kernels.hpp"
#include "vproj/least_squares.hpp"
#include "vproj/rng.hpp"

using namespace vproj;

namespace {

DenseMatrix random_matrix(Rng& rng, std::size_t m, std::size_t n) {
  DenseMatrix a(m, n);
  for (double& x : a.storage()) x = rng.uniform(-1.0, 1.0);
  return a;
}

DenseVector random_vector(Rng& rng, std::size_t n) {
  DenseVector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = rng.uniform(-1.0, 1.0);
  return v;
}

DenseMatrix explicit_pinv(const LeastSquaresFactorization& fac) {
  DenseMatrix pinv(fac.cols, fac.rows);
  for (std::size_t i = 0; i < fac.rows; ++i) {
    DenseVector e(fac.rows, 0.0);
    e[i] = 1.0;
    const DenseVector col = apply_pseudo_inverse(fac, e);
    for (std::size_t j = 0; j < fac.cols; ++j) pinv(j, i) = col[j];
  }
  return pinv;
}

double rel_fro_diff(const DenseMatrix& a, const DenseMatrix& b) {
  double diff = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double d = a(i, j) - b(i, j);
      diff += d * d;
      ref += b(i, j) * b(i, j);
    }
  return std::sqrt(diff) / (1.0 + std::sqrt(ref));
}

}  // namespace

TEST(Factorize, IdentityActsAsIdentity) {
  const DenseMatrix eye = DenseMatrix::identity(3);
  const auto fac = factorize_least_squares(eye);
  const DenseVector y{1.5, -2.0, 0.25};
  const DenseVector c = apply_pseudo_inverse(fac, y);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(c[i], y[i], 1e-14);
}

TEST(Factorize, ColumnOfOnesAverages) {
  DenseMatrix ones(2, 1, 1.0);
  const auto fac = factorize_least_squares(ones);
  const DenseVector c = apply_pseudo_inverse(fac, DenseVector{2.0, 4.0});
  ASSERT_EQ(c.size(), 1u);
  EXPECT_NEAR(c[0], 3.0, 1e-14);
}

TEST(Factorize, MoorePenroseConditionsAgainstSvdOracle) {
  Rng rng(42);
  const DenseMatrix a = random_matrix(rng, 5, 3);
  const auto fac = factorize_least_squares(a);
  EXPECT_EQ(fac.rank, 3u);
  const DenseMatrix pinv = explicit_pinv(fac);
  const DenseMatrix oracle = vproj::testing::svd_pinv(a);
  EXPECT_LT(rel_fro_diff(pinv, oracle), 1e-10);

  const DenseMatrix apa = serial::matmul(serial::matmul(a, pinv), a);
  const DenseMatrix pap = serial::matmul(serial::matmul(pinv, a), pinv);
  EXPECT_LT(rel_fro_diff(apa, a), 1e-10);
  EXPECT_LT(rel_fro_diff(pap, pinv), 1e-10);
  const DenseMatrix ap = serial::matmul(a, pinv);
  const DenseMatrix pa = serial::matmul(pinv, a);
  EXPECT_LT(rel_fro_diff(ap.transposed(), ap), 1e-10);
  EXPECT_LT(rel_fro_diff(pa.transposed(), pa), 1e-10);
}

TEST(Factorize, RejectsNonFiniteNamingCoordinate) {
  DenseMatrix a(3, 2, 1.0);
  a(1, 1) = std::numeric_limits<double>::quiet_NaN();
  try {
    factorize_least_squares(a);
    FAIL() << "expected rejection";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("(1, 1)"), std::string::npos);
  }
}

TEST(Factorize, RequiresTallMatrix) {
  EXPECT_THROW(factorize_least_squares(DenseMatrix(2, 3, 1.0)), std::invalid_argument);
}

TEST(PseudoInverse, OrthonormalColumnsGiveTransposeAction) {
  DenseMatrix q(3, 2, 0.0);
  q(0, 0) = 1.0;
  q(1, 1) = 1.0;
  const auto fac = factorize_least_squares(q);
  const DenseVector y{3.0, -4.0, 9.0};
  const DenseVector c = apply_pseudo_inverse(fac, y);
  EXPECT_NEAR(c[0], 3.0, 1e-14);
  EXPECT_NEAR(c[1], -4.0, 1e-14);
}

TEST(PseudoInverse, ZeroResidualInsideColumnSpace) {
  Rng rng(3);
  const DenseMatrix a = random_matrix(rng, 6, 3);
  const DenseVector x = random_vector(rng, 3);
  const DenseVector y = serial::matvec(a, x);
  const auto fac = factorize_least_squares(a);
  const DenseVector c = apply_pseudo_inverse(fac, y);
  EXPECT_LT(norm2(y - serial::matvec(a, c)), 1e-10 * norm2(y));
}

TEST(PseudoInverse, MinimumNormOnDuplicatedColumn) {
  Rng rng(5);
  DenseMatrix a = random_matrix(rng, 6, 3);
  for (std::size_t i = 0; i < 6; ++i) a(i, 2) = a(i, 0);  // exact rank 2
  const auto fac = factorize_least_squares(a);
  EXPECT_EQ(fac.rank, 2u);
  EXPECT_TRUE(fac.rank_deficient());

  const DenseVector y = random_vector(rng, 6);
  const DenseVector c = apply_pseudo_inverse(fac, y);
  const DenseMatrix oracle = vproj::testing::svd_pinv(a);
  const DenseVector want = serial::matvec(oracle, y);
  EXPECT_LT(norm2(c - want), 1e-8 * (1.0 + norm2(want)));
}

TEST(PseudoInverse, LengthMismatchRejected) {
  const auto fac = factorize_least_squares(DenseMatrix::identity(3));
  EXPECT_THROW(apply_pseudo_inverse(fac, DenseVector(2, 1.0)), std::invalid_argument);
  EXPECT_THROW(apply_projector_complement(fac, DenseVector(4, 1.0)), std::invalid_argument);
  EXPECT_THROW(apply_pinv_transpose(fac, DenseVector(2, 1.0)), std::invalid_argument);
}

TEST(PinvTranspose, MatchesExplicitOracle) {
  Rng rng(17);
  for (int deficient = 0; deficient < 2; ++deficient) {
    DenseMatrix a = random_matrix(rng, 7, 4);
    if (deficient)
      for (std::size_t i = 0; i < 7; ++i) a(i, 3) = 2.0 * a(i, 1);
    const auto fac = factorize_least_squares(a);
    const DenseMatrix oracle = vproj::testing::svd_pinv(a);  // n x m
    const DenseVector w = random_vector(rng, 4);
    const DenseVector got = apply_pinv_transpose(fac, w);
    const DenseVector want = serial::matvec_transposed(oracle, w);
    EXPECT_LT(norm2(got - want), 1e-9 * (1.0 + norm2(want)));
  }
}

TEST(Projector, AxisExample) {
  DenseMatrix e1(2, 1, 0.0);
  e1(0, 0) = 1.0;
  const auto fac = factorize_least_squares(e1);
  const DenseVector pv = apply_projector_complement(fac, DenseVector{3.0, 5.0});
  EXPECT_NEAR(pv[0], 0.0, 1e-14);
  EXPECT_NEAR(pv[1], 5.0, 1e-14);
}

TEST(Projector, AnnihilatesColumnSpace) {
  Rng rng(9);
  const DenseMatrix a = random_matrix(rng, 8, 4);
  const auto fac = factorize_least_squares(a);
  for (std::size_t j = 0; j < 4; ++j) {
    DenseVector col(8);
    for (std::size_t i = 0; i < 8; ++i) col[i] = a(i, j);
    EXPECT_LT(norm2(apply_projector_complement(fac, col)), 1e-10 * norm2(col));
  }
}

TEST(Projector, IdempotentAgainstExplicitOracle) {
  Rng rng(11);
  const DenseMatrix a = random_matrix(rng, 7, 3);
  const auto fac = factorize_least_squares(a);
  const DenseMatrix proj = vproj::testing::svd_projector_complement(a);
  const DenseVector v = random_vector(rng, 7);
  const DenseVector pv = apply_projector_complement(fac, v);
  const DenseVector ppv = apply_projector_complement(fac, pv);
  EXPECT_LT(norm2(ppv - pv), 1e-10 * norm2(v));
  const DenseVector want = serial::matvec(proj, v);
  EXPECT_LT(norm2(pv - want), 1e-10 * (1.0 + norm2(v)));
}

TEST(RegularizedNormal, IdentitySystem) {
  const auto d = solve_regularized_normal(DenseMatrix::identity(2), DenseVector{1.0, 0.0}, 0.0);
  ASSERT_TRUE(d.has_value());
  EXPECT_NEAR((*d)[0], -1.0, 1e-14);
  EXPECT_NEAR((*d)[1], 0.0, 1e-14);
}

TEST(RegularizedNormal, PureDamping) {
  const DenseVector g{2.0, -3.0, 0.5};
  const auto d = solve_regularized_normal(DenseMatrix(3, 3, 0.0), g, 1.0);
  ASSERT_TRUE(d.has_value());
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR((*d)[i], -g[i], 1e-14);
}

TEST(RegularizedNormal, RandomSpdResidual) {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t k = 2 + rng.index(6);
    const DenseMatrix a = random_matrix(rng, k, k);
    DenseMatrix h = serial::gram(a);
    for (std::size_t i = 0; i < k; ++i) h(i, i) += 0.5;
    const DenseVector g = random_vector(rng, k);
    const auto d = solve_regularized_normal(h, g, 0.0);
    ASSERT_TRUE(d.has_value());
    DenseVector res(k);
    for (std::size_t i = 0; i < k; ++i) {
      double s = g[i];
      for (std::size_t j = 0; j < k; ++j) s += h(i, j) * (*d)[j];
      res[i] = s;
    }
    EXPECT_LT(norm2(res), 1e-10 * norm2(g));
  }
}

TEST(RegularizedNormal, SingularAtZeroDampingSignalsNotCrashes) {
  DenseMatrix h(2, 2, 0.0);
  h(0, 0) = 1.0;  // rank 1
  EXPECT_FALSE(solve_regularized_normal(h, DenseVector{1.0, 1.0}, 0.0).has_value());
  EXPECT_TRUE(solve_regularized_normal(h, DenseVector{1.0, 1.0}, 1e-3).has_value());
}

TEST(FiniteDifference, IdentityMap) {
  const auto f = [](const DenseVector& a) { return a; };
  const DenseMatrix jac = finite_difference_jacobian(f, DenseVector{1.0, 2.0, 3.0}, 1e-6);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(jac(i, j), i == j ? 1.0 : 0.0, 1e-9);
}

TEST(FiniteDifference, PolynomialExample) {
  const auto f = [](const DenseVector& a) {
    return DenseVector{a[0] * a[0], a[0] * a[1]};
  };
  const DenseMatrix jac = finite_difference_jacobian(f, DenseVector{1.0, 2.0}, 1e-6);
  EXPECT_NEAR(jac(0, 0), 2.0, 1e-6);
  EXPECT_NEAR(jac(0, 1), 0.0, 1e-6);
  EXPECT_NEAR(jac(1, 0), 2.0, 1e-6);
  EXPECT_NEAR(jac(1, 1), 1.0, 1e-6);
}

TEST(FiniteDifference, RejectsNonFiniteWithCoordinate) {
  const auto f = [](const DenseVector& a) {
    return DenseVector{a[0] > 1.5 ? std::numeric_limits<double>::infinity() : a[0]};
  };
  try {
    finite_difference_jacobian(f, DenseVector{1.5}, 0.1);
    FAIL() << "expected rejection";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("coordinate 0"), std::string::npos);
  }
}

TEST(Kernels, SerialAndParallelAgreeBitExactly) {
  Rng rng(21);
  // Sizes straddling the parallel cutoff.
  for (const auto [m, k, n] : {std::tuple<int, int, int>{5, 4, 3}, {70, 60, 50}, {150, 80, 90}}) {
    const DenseMatrix a = random_matrix(rng, m, k);
    const DenseMatrix b = random_matrix(rng, k, n);
    EXPECT_EQ(matmul(a, b).storage(), serial::matmul(a, b).storage());
    EXPECT_EQ(gram(a).storage(), serial::gram(a).storage());
    const DenseVector x = random_vector(rng, k);
    EXPECT_EQ(matvec(a, x).storage(), serial::matvec(a, x).storage());
    const DenseVector t = random_vector(rng, m);
    EXPECT_EQ(matvec_transposed(a, t).storage(), serial::matvec_transposed(a, t).storage());
  }
}

#ifdef _OPENMP
TEST(Kernels, FactorizationIndependentOfThreadCount) {
  Rng rng(23);
  const DenseMatrix a = random_matrix(rng, 300, 40);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto fac1 = factorize_least_squares(a);
  omp_set_num_threads(std::max(saved, 4));
  const auto fac4 = factorize_least_squares(a);
  omp_set_num_threads(saved);
  EXPECT_EQ(fac1.qr.storage(), fac4.qr.storage());
  EXPECT_EQ(fac1.tau, fac4.tau);
  EXPECT_EQ(fac1.perm, fac4.perm);
}
#endif

TEST(Properties, MoorePenroseBatteryIncludingRankDeficient) {
  Rng rng(31);
  for (std::size_t it = 0; it < 60; ++it) {
    const std::size_t m = 3 + rng.index(8);
    const std::size_t n = 1 + rng.index(std::min<std::size_t>(m, 6));
    DenseMatrix a = random_matrix(rng, m, n);
    if (it % 3 == 0 && n >= 2)
      for (std::size_t i = 0; i < m; ++i) a(i, n - 1) = -0.5 * a(i, 0);
    const auto fac = factorize_least_squares(a);
    const DenseMatrix pinv = explicit_pinv(fac);
    const DenseMatrix apa = serial::matmul(serial::matmul(a, pinv), a);
    const DenseMatrix pap = serial::matmul(serial::matmul(pinv, a), pinv);
    ASSERT_LT(rel_fro_diff(apa, a), 1e-10) << "instance " << it;
    ASSERT_LT(rel_fro_diff(pap, pinv), 1e-10) << "instance " << it;

    const DenseVector y = random_vector(rng, m);
    const DenseVector res = y - serial::matvec(a, apply_pseudo_inverse(fac, y));
    ASSERT_LT(norm2(serial::matvec_transposed(a, res)),
              1e-10 * (1.0 + frobenius_norm(a) * norm2(y)))
        << "instance " << it;
  }
}
