#include <gtest/gtest.h>

#include <set>

#include <gdeconv/error.hpp>
#include <gdeconv/graphs.hpp>
#include <gdeconv/signals.hpp>
#include <gdeconv/spectral.hpp>

#include "oracles.hpp"

using namespace gdeconv;

namespace {

struct GraphSetup {
  Eigen::MatrixXd shift;
  SpectralDecomposition dec;
};

GraphSetup er(std::size_t n, std::uint64_t seed) {
  for (;; ++seed) {
    const Graph g = erdos_renyi(n, 0.3, seed);
    if (!is_connected(g)) continue;
    const ShiftOperator s = normalized_adjacency(g);
    return {s.matrix(), eig_sym(s)};
  }
}

}  // namespace

TEST(SparseInputMatrix, SupportIsExact) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(3, 2);
  x(2, 0) = 1.5;
  x(0, 1) = -2.0;
  const SparseInputMatrix m(x);
  EXPECT_EQ(m.nnz(), 2u);
  EXPECT_EQ(m.support()[0], (std::pair<Eigen::Index, Eigen::Index>{2, 0}));
  EXPECT_EQ(m.vec_support(), (std::vector<Eigen::Index>{2, 3}));
  EXPECT_EQ(m.max_column_nnz(), 1u);
}

TEST(BernoulliGaussian, Extremes) {
  const SparseInputMatrix none = bernoulli_gaussian(10, 4, 0.0, 1);
  EXPECT_EQ(none.nnz(), 0u);
  EXPECT_TRUE(none.values().isZero(0.0));
  EXPECT_EQ(bernoulli_gaussian(10, 4, 1.0, 1).nnz(), 40u);
  EXPECT_THROW(bernoulli_gaussian(10, 4, 1.1, 1), ParameterError);
}

TEST(BernoulliGaussian, EmpiricalRate) {
  double nnz = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) nnz += bernoulli_gaussian(50, 20, 0.1, seed).nnz();
  EXPECT_NEAR(nnz / (100.0 * 50 * 20), 0.1, 0.01);
}

TEST(FixedSparsity, Counts) {
  EXPECT_EQ(fixed_sparsity_inputs(5, 3, 15, 1).nnz(), 15u);
  EXPECT_EQ(fixed_sparsity_inputs(5, 3, 1, 1).nnz(), 1u);
  for (std::uint64_t seed = 0; seed < 20; ++seed) EXPECT_EQ(fixed_sparsity_inputs(50, 10, 25, seed).nnz(), 25u);
  EXPECT_THROW(fixed_sparsity_inputs(5, 3, 0, 1), ParameterError);
  EXPECT_THROW(fixed_sparsity_inputs(5, 3, 16, 1), ParameterError);
}

TEST(FixedSparsity, SeedsReproduceAndDiffer) {
  EXPECT_EQ(fixed_sparsity_inputs(20, 5, 8, 42).values(), fixed_sparsity_inputs(20, 5, 8, 42).values());
  for (std::uint64_t s = 0; s < 10; ++s) {
    EXPECT_NE(fixed_sparsity_inputs(20, 5, 8, 2 * s).vec_support(),
              fixed_sparsity_inputs(20, 5, 8, 2 * s + 1).vec_support());
  }
}

TEST(FixedSparsity, PositionsRoughlyUniform) {
  std::vector<int> hits(12, 0);
  for (std::uint64_t seed = 0; seed < 3000; ++seed) {
    for (Eigen::Index k : fixed_sparsity_inputs(4, 3, 2, seed).vec_support()) ++hits[static_cast<std::size_t>(k)];
  }
  // 6000 picks over 12 cells: 500 each, sd ~ 21.
  for (int h : hits) EXPECT_NEAR(h, 500, 110);
}

TEST(MakeFilter, AlphaZeroIsIdentity) {
  const GraphSetup s = er(15, 1);
  const FilterDraw d = make_filter(5, 0.0, 7, s.dec);
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(5);
  e1(0) = 1.0;
  EXPECT_EQ(*d.filter.coeffs(), e1);
  EXPECT_TRUE(d.filter.response(s.dec).isApprox(Eigen::VectorXd::Ones(15)));
  EXPECT_EQ(d.redraws, 0u);
}

TEST(MakeFilter, UnitL1AndMostlyFirstDraw) {
  const GraphSetup s = er(30, 2);
  int first = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const FilterDraw d = make_filter(5, 0.1, seed, s.dec);
    EXPECT_NEAR(d.filter.coeffs()->lpNorm<1>(), 1.0, 1e-12);
    EXPECT_TRUE(is_invertible(d.filter, s.dec));
    first += d.redraws == 0;
  }
  EXPECT_GE(first, 190);
}

TEST(MakeFilter, BudgetExhaustion) {
  // Eigenvalues 0 and 1e12: |h~| spans more than 1e8 for any h1 that is not tiny.
  SpectralDecomposition d{Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(0.0, 1e12)};
  EXPECT_THROW(make_filter(2, 0.1, 1, d, 3), SingularFilterError);
  EXPECT_THROW(make_filter(0, 0.1, 1, d), ParameterError);
  EXPECT_THROW(make_filter(2, -0.1, 1, d), ParameterError);
  EXPECT_THROW(make_filter(3, 0.1, 1, d), ParameterError);
}

TEST(Synthesize, IdentityFilter) {
  const GraphSetup s = er(12, 3);
  const SparseInputMatrix x0 = fixed_sparsity_inputs(12, 4, 6, 5);
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(3);
  e1(0) = 1.0;
  const GroundTruth t = synthesize(x0, FilterSpec::from_coeffs(e1), s.dec);
  EXPECT_LT((t.y - x0.values()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Synthesize, OneHopSpike) {
  const GraphSetup s = er(12, 4);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(12, 2);
  x(5, 0) = 1.0;
  const GroundTruth t = synthesize(SparseInputMatrix(x), FilterSpec::from_coeffs(Eigen::Vector2d(0, 1)), s.dec);
  EXPECT_LT((t.y.col(0) - s.shift.col(5)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Synthesize, InverseFilterRecoversScaledInputs) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const GraphSetup s = er(20, 10 + seed);
    const SparseInputMatrix x0 = fixed_sparsity_inputs(20, 5, 10, seed);
    const GroundTruth t = synthesize(x0, make_filter(5, 0.3, seed, s.dec).filter, s.dec);
    const Eigen::VectorXd h = t.h0.response(s.dec);
    EXPECT_LT((t.g0.cwiseProduct(h) - Eigen::VectorXd::Ones(20)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((t.y - oracle::poly_filter(*t.h0.coeffs(), s.shift, x0.values())).cwiseAbs().maxCoeff(), 1e-10);
    const Eigen::MatrixXd& v = s.dec.eigenvectors;
    const Eigen::VectorXd gn = t.g0_normalized();
    const Eigen::MatrixXd back = v * gn.asDiagonal() * v.transpose() * t.y;
    const double c = 1.0 / t.g0_sum();
    EXPECT_LT((back - c * x0.values()).norm() / x0.values().norm(), 1e-8);
  }
}

TEST(Synthesize, RejectsSingularFilter) {
  const SpectralDecomposition d = eig_sym(Eigen::MatrixXd::Zero(3, 3));
  EXPECT_THROW(synthesize(fixed_sparsity_inputs(3, 1, 1, 1), FilterSpec::from_coeffs(Eigen::Vector2d(0, 1)), d),
               SingularFilterError);
}
