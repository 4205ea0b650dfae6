#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <gdeconv/error.hpp>
#include <gdeconv/graphs.hpp>
#include <gdeconv/spectral.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace gdeconv;

namespace {

Eigen::MatrixXd random_symmetric(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = nd(rng);
  return (a + a.transpose()) / 2.0;
}

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd a(r, c);
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = nd(rng);
  return a;
}

SpectralDecomposition connected_er(std::size_t n, std::uint64_t seed, Eigen::MatrixXd* shift = nullptr) {
  for (;; ++seed) {
    const Graph g = erdos_renyi(n, 0.3, seed);
    if (!is_connected(g)) continue;
    const ShiftOperator s = normalized_adjacency(g);
    if (shift) *shift = s.matrix();
    return eig_sym(s);
  }
}

}  // namespace

TEST(EigSym, TwoByTwo) {
  Eigen::MatrixXd s(2, 2);
  s << 0, 1, 1, 0;
  const SpectralDecomposition d = eig_sym(s);
  EXPECT_NEAR(d.eigenvalues(0), -1.0, 1e-15);
  EXPECT_NEAR(d.eigenvalues(1), 1.0, 1e-15);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(d.eigenvectors(0, 0), r, 1e-15);  // tie broken toward the first entry
  EXPECT_NEAR(d.eigenvectors(1, 0), -r, 1e-15);
  EXPECT_NEAR(d.eigenvectors(0, 1), r, 1e-15);
  EXPECT_NEAR(d.eigenvectors(1, 1), r, 1e-15);
}

TEST(EigSym, Identity) {
  const SpectralDecomposition d = eig_sym(Eigen::MatrixXd::Identity(3, 3));
  EXPECT_TRUE(d.eigenvalues.isApprox(Eigen::Vector3d::Ones()));
  const Eigen::MatrixXd& v = d.eigenvectors;
  EXPECT_TRUE((v * d.eigenvalues.asDiagonal() * v.transpose()).isApprox(Eigen::MatrixXd::Identity(3, 3)));
}

TEST(EigSym, RandomReconstruction) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Eigen::MatrixXd s = random_symmetric(8, seed);
    const SpectralDecomposition d = eig_sym(s);
    const Eigen::MatrixXd& v = d.eigenvectors;
    EXPECT_LT((v.transpose() * v - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((v * d.eigenvalues.asDiagonal() * v.transpose() - s).norm() / s.norm(), 1e-9);
    for (Eigen::Index i = 1; i < 8; ++i) EXPECT_LE(d.eigenvalues(i - 1), d.eigenvalues(i));
    for (Eigen::Index k = 0; k < 8; ++k) {
      Eigen::Index arg;
      v.col(k).cwiseAbs().maxCoeff(&arg);
      EXPECT_GT(v(arg, k), 0.0);
    }
    const SpectralDecomposition again = eig_sym(s);
    EXPECT_EQ(again.eigenvectors, d.eigenvectors);
  }
}

TEST(EigSym, RejectsAsymmetric) {
  Eigen::MatrixXd s(2, 2);
  s << 0, 1, 0, 0;
  EXPECT_THROW(eig_sym(s), ContractError);
}

TEST(Vandermonde, Examples) {
  Eigen::MatrixXd expect(2, 2);
  expect << 1, 1, 1, -1;
  EXPECT_EQ(vandermonde(Eigen::Vector2d(1, -1), 2), expect);
  EXPECT_EQ(vandermonde(Eigen::Vector3d(0.3, 2, -4), 1), Eigen::MatrixXd::Ones(3, 1));
  Eigen::MatrixXd psi = vandermonde(Eigen::Vector3d(0.5, -0.25, 1), 3);
  Eigen::MatrixXd want(3, 3);
  want << 1, 0.5, 0.25, 1, -0.25, 0.0625, 1, 1, 1;
  EXPECT_TRUE(psi.isApprox(want, 1e-15));
  EXPECT_THROW(vandermonde(Eigen::Vector2d(1, 2), 0), ParameterError);
  EXPECT_THROW(vandermonde(Eigen::Vector2d(1, 2), 3), ParameterError);
}

TEST(FreqResponse, Examples) {
  SpectralDecomposition d{Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(1, -1)};
  EXPECT_TRUE(freq_response(Eigen::VectorXd::Ones(1), d).isApprox(Eigen::Vector2d::Ones()));
  EXPECT_TRUE(freq_response(Eigen::Vector2d(1, 0.5), d).isApprox(Eigen::Vector2d(1.5, 0.5)));
  const SpectralDecomposition er = connected_er(12, 3);
  EXPECT_TRUE(freq_response(Eigen::Vector2d(0, 1), er).isApprox(er.eigenvalues));
}

TEST(FreqResponse, Linear) {
  const SpectralDecomposition d = connected_er(15, 1);
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::VectorXd h1 = random_matrix(5, 1, rng), h2 = random_matrix(5, 1, rng);
    const double a = 0.7, b = -1.3;
    const Eigen::VectorXd lhs = freq_response(a * h1 + b * h2, d);
    const Eigen::VectorXd rhs = a * freq_response(h1, d) + b * freq_response(h2, d);
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(FilterSpec, Representations) {
  const SpectralDecomposition d = connected_er(10, 2);
  const Eigen::VectorXd h = Eigen::Vector3d(0.5, 0.3, -0.2);
  const FilterSpec both = FilterSpec::from_both(h, freq_response(h, d), d);
  EXPECT_EQ(both.order(), 3u);
  EXPECT_THROW(FilterSpec::from_both(h, freq_response(h, d) * 1.01, d), ContractError);
  EXPECT_EQ(FilterSpec::from_response(Eigen::VectorXd::Ones(10)).order(), 0u);
  EXPECT_TRUE(FilterSpec::from_coeffs(h).response(d).isApprox(freq_response(h, d)));
}

TEST(ApplyFilter, IdentityAndShift) {
  Eigen::MatrixXd s;
  const SpectralDecomposition d = connected_er(10, 4, &s);
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd x = random_matrix(10, 3, rng);
  EXPECT_LT((apply_filter(FilterSpec::from_coeffs(Eigen::VectorXd::Ones(1)), d, x) - x).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((apply_filter(FilterSpec::from_coeffs(Eigen::Vector2d(0, 1)), d, x) - s * x).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ApplyFilter, MatchesPolynomialOracle) {
  Eigen::MatrixXd s;
  const SpectralDecomposition d = connected_er(10, 8, &s);
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::VectorXd h = random_matrix(5, 1, rng);
    const Eigen::MatrixXd x = random_matrix(10, 4, rng);
    const Eigen::MatrixXd want = oracle::poly_filter(h, s, x);
    EXPECT_LT((apply_filter(FilterSpec::from_coeffs(h), d, x) - want).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LT((apply_filter_polynomial(h, s, x) - want).cwiseAbs().maxCoeff(), 1e-8);
  }
  EXPECT_THROW(apply_filter(FilterSpec::from_coeffs(Eigen::VectorXd::Ones(1)), d, Eigen::MatrixXd::Ones(9, 2)),
               ContractError);
}

TEST(ApplyFilter, InverseComposesToIdentity) {
  const SpectralDecomposition d = connected_er(12, 9);
  std::mt19937_64 rng(3);
  const Eigen::VectorXd h = Eigen::Vector3d(1.0, 0.2, -0.1);
  const FilterSpec f = FilterSpec::from_coeffs(h);
  const FilterSpec g = FilterSpec::from_response(inverse_response(f, d));
  const Eigen::MatrixXd x = random_matrix(12, 3, rng);
  EXPECT_LT((apply_filter(g, d, apply_filter(f, d, x)) - x).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Invertibility, Examples) {
  const SpectralDecomposition star = eig_sym(adjacency_shift(fixtures::star3()));
  EXPECT_TRUE(is_invertible(FilterSpec::from_coeffs(Eigen::VectorXd::Ones(1)), star));
  EXPECT_FALSE(is_invertible(FilterSpec::from_coeffs(Eigen::Vector2d(0, 1)), star));
  const SpectralDecomposition na = connected_er(20, 11);
  const Eigen::VectorXd resp = freq_response(Eigen::Vector2d(1, 0.1), na);
  EXPECT_TRUE(is_invertible(resp));
  EXPECT_GE(resp.cwiseAbs().minCoeff(), 0.9 - 1e-12);
  EXPECT_FALSE(is_invertible(Eigen::Vector2d(1, 0)));
  EXPECT_TRUE(is_invertible(Eigen::Vector2d(1, 1e-3), 1e-4));
  EXPECT_FALSE(is_invertible(Eigen::Vector2d(1, 1e-3), 1e-2));
}

TEST(InverseResponse, Examples) {
  EXPECT_TRUE(inverse_response(Eigen::VectorXd::Ones(4)).isApprox(Eigen::VectorXd::Ones(4)));
  EXPECT_TRUE(inverse_response(Eigen::Vector2d(2, 0.5)).isApprox(Eigen::Vector2d(0.5, 2)));
  std::mt19937_64 rng(4);
  const Eigen::VectorXd h = random_matrix(30, 1, rng);
  EXPECT_LT((inverse_response(h).cwiseProduct(h) - Eigen::VectorXd::Ones(30)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_THROW(inverse_response(Eigen::Vector2d(1, 0)), SingularFilterError);
}

TEST(Vec, ColumnMajor) {
  Eigen::MatrixXd x(2, 3);
  x << 1, 2, 3, 4, 5, 6;
  EXPECT_EQ(vec(x), oracle::stack_columns(x));
  EXPECT_EQ(vec(x)(1), 4.0);
  EXPECT_EQ(unvec(vec(x), 2, 3), x);
}

TEST(KhatriRao, TwoNodeExample) {
  const double r = 1.0 / std::sqrt(2.0);
  SpectralDecomposition d;
  d.eigenvectors.resize(2, 2);
  d.eigenvectors << r, r, r, -r;
  d.eigenvalues = Eigen::Vector2d(1, -1);
  Eigen::MatrixXd want(2, 2);
  want << 0.5, 0.5, 0.5, -0.5;
  EXPECT_TRUE(khatri_rao_z(Eigen::Vector2d(1, 0), d).isApprox(want, 1e-15));
}

TEST(KhatriRao, VecIdentityOnRandomDraws) {
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 20; ++rep) {
    const SpectralDecomposition d = connected_er(9, 100 + static_cast<std::uint64_t>(rep));
    const Eigen::MatrixXd y = random_matrix(9, 4, rng);
    const Eigen::VectorXd g = random_matrix(9, 1, rng);
    const Eigen::MatrixXd z = khatri_rao_z(y, d);
    EXPECT_LT((z - oracle::khatri_rao(y, d.eigenvectors)).cwiseAbs().maxCoeff(), 1e-12);
    const Eigen::MatrixXd& v = d.eigenvectors;
    const Eigen::VectorXd want = oracle::stack_columns(v * g.asDiagonal() * v.transpose() * y);
    EXPECT_LT((z * g - want).cwiseAbs().maxCoeff(), 1e-10);
  }
  const SpectralDecomposition d = connected_er(5, 1);
  EXPECT_TRUE(khatri_rao_z(Eigen::MatrixXd::Zero(5, 2), d).isZero(0.0));
  EXPECT_THROW(khatri_rao_z(Eigen::MatrixXd::Zero(4, 2), d), ContractError);
}

TEST(CoeffsFromResponse, Examples) {
  const SpectralDecomposition d = connected_er(12, 21);
  const CoefficientFit one = coeffs_from_response(Eigen::VectorXd::Ones(12), d, 1);
  EXPECT_NEAR(one.coeffs(0), 1.0, 1e-12);
  EXPECT_NEAR(one.residual, 0.0, 1e-12);
  EXPECT_FALSE(one.warning.has_value());

  const Eigen::VectorXd h = Eigen::Vector4d(0.6, -0.2, 0.15, 0.05);
  const CoefficientFit back = coeffs_from_response(freq_response(h, d), d, 4);
  EXPECT_LT((back.coeffs - h).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_THROW(coeffs_from_response(Eigen::VectorXd::Ones(12), d, 13), ParameterError);
}

TEST(CoeffsFromResponse, RepeatedEigenvaluesWarn) {
  // Star K_{1,3} adjacency: eigenvalues -sqrt3, 0, 0, sqrt3.
  const SpectralDecomposition d = eig_sym(adjacency_shift(fixtures::star3()));
  EXPECT_EQ(count_distinct_eigenvalues(d.eigenvalues), 3u);
  Eigen::VectorXd resp(4);
  resp << 1.0, 2.0, 3.0, 4.0;  // conflicting values on the repeated eigenvalue 0
  const CoefficientFit fit = coeffs_from_response(resp, d, 4);
  EXPECT_GT(fit.residual, 1e-3);
  EXPECT_LT(fit.rank, 4);
  EXPECT_TRUE(fit.warning.has_value());
}
