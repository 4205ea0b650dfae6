#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include <gdeconv/error.hpp>
#include <gdeconv/experiments.hpp>
#include <gdeconv/graphs.hpp>
#include <gdeconv/identifiability.hpp>
#include <gdeconv/solver.hpp>
#include <gdeconv/spectral.hpp>

#include "fixtures.hpp"

using namespace gdeconv;

namespace {

std::vector<std::pair<std::size_t, std::size_t>> pairs_of(const AmbiguityReport& r) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const AmbiguousPair& p : r.pairs) out.emplace_back(p.i, p.j);
  return out;
}

using Pairs = std::vector<std::pair<std::size_t, std::size_t>>;

}  // namespace

TEST(Ambiguity, PathTwinLeaves) {
  const AmbiguityReport r = detect_ambiguities(adjacency_shift(fixtures::path3()));
  EXPECT_TRUE(r.ambiguous());
  EXPECT_EQ(pairs_of(r), (Pairs{{0, 2}}));
  EXPECT_NEAR(r.pairs[0].eigenvalue, 0.0, 1e-12);
}

TEST(Ambiguity, TrianglePendant) {
  const AmbiguityReport r = detect_ambiguities(adjacency_shift(fixtures::triangle_pendant()));
  EXPECT_EQ(pairs_of(r), (Pairs{{1, 2}}));
  EXPECT_NEAR(r.pairs[0].eigenvalue, -1.0, 1e-12);
}

TEST(Ambiguity, WeightedStarHasNone) {
  EXPECT_FALSE(detect_ambiguities(adjacency_shift(fixtures::weighted_star())).ambiguous());
  EXPECT_FALSE(detect_ambiguities(normalized_adjacency(fixtures::weighted_star())).ambiguous());
}

TEST(Ambiguity, ReportedPairsAreEigenvectors) {
  for (const Graph& g : {fixtures::path3(), fixtures::triangle_pendant(), fixtures::star3(), fixtures::seven_node()}) {
    const Eigen::MatrixXd s = adjacency_shift(g).matrix();
    for (const AmbiguousPair& p : detect_ambiguities(s).pairs) {
      const Eigen::VectorXd u = pair_vector(s.rows(), static_cast<Eigen::Index>(p.i), static_cast<Eigen::Index>(p.j));
      EXPECT_LT((s * u - p.eigenvalue * u).cwiseAbs().maxCoeff(), 1e-9);
      EXPECT_LT(p.i, p.j);
    }
  }
}

TEST(Ambiguity, StarHasAllLeafPairs) {
  EXPECT_EQ(pairs_of(detect_ambiguities(adjacency_shift(fixtures::star3()))), (Pairs{{1, 2}, {1, 3}, {2, 3}}));
}

TEST(Ambiguity, RelabelingPermutesPairs) {
  const std::vector<std::size_t> perm{3, 0, 2, 1};  // old label k becomes perm[k]
  const Graph g = fixtures::triangle_pendant();
  std::vector<Edge> moved;
  for (const Edge& e : g.edges()) moved.push_back({perm[e.i], perm[e.j], e.w});
  const AmbiguityReport a = detect_ambiguities(adjacency_shift(g));
  const AmbiguityReport b = detect_ambiguities(adjacency_shift(Graph(4, moved)));
  Pairs mapped;
  for (const AmbiguousPair& p : a.pairs) mapped.emplace_back(std::min(perm[p.i], perm[p.j]), std::max(perm[p.i], perm[p.j]));
  std::sort(mapped.begin(), mapped.end());
  EXPECT_EQ(pairs_of(b), mapped);
}

TEST(PairEigenvector, SevenNodeFixture) {
  const SpectralDecomposition dec = eig_sym(adjacency_shift(fixtures::seven_node()));
  const auto k = find_pair_eigenvector(dec, 1, 3);
  ASSERT_TRUE(k.has_value());
  EXPECT_EQ(*k, 3);
  EXPECT_FALSE(find_pair_eigenvector(dec, 0, 2).has_value());
}

TEST(PairEigenvector, AlignsInsideDegenerateEigenspace) {
  const SpectralDecomposition dec = eig_sym(adjacency_shift(fixtures::star3()));
  const auto [aligned, k] = align_pair_eigenvector(dec, 1, 3);
  const Eigen::VectorXd u = pair_vector(4, 1, 3);
  EXPECT_NEAR(std::abs(aligned.eigenvectors.col(k).dot(u)), 1.0, 1e-10);
  EXPECT_LT((aligned.eigenvectors.transpose() * aligned.eigenvectors - Eigen::MatrixXd::Identity(4, 4)).norm(), 1e-10);
  const Eigen::MatrixXd s = adjacency_shift(fixtures::star3()).matrix();
  EXPECT_LT((aligned.eigenvectors * aligned.eigenvalues.asDiagonal() * aligned.eigenvectors.transpose() - s).norm(),
            1e-10);
  EXPECT_THROW(align_pair_eigenvector(dec, 0, 1), ContractError);
}

TEST(Alternative, SwapsRowsAndPreservesObservations) {
  const SpectralDecomposition dec = eig_sym(adjacency_shift(fixtures::seven_node()));
  Eigen::MatrixXd x0 = Eigen::MatrixXd::Zero(7, 3);
  x0(1, 0) = 1.0;
  x0(5, 1) = -0.7;
  x0(3, 2) = 2.0;
  x0(0, 2) = 0.4;
  Eigen::VectorXd h0 = Eigen::VectorXd::LinSpaced(7, 0.5, 1.5);
  const AlternativeSolution alt = construct_alternative(x0, h0, dec, 1, 3, 3);

  Eigen::MatrixXd swapped = x0;
  swapped.row(1) = x0.row(3);
  swapped.row(3) = x0.row(1);
  EXPECT_LT((alt.x1 - swapped).cwiseAbs().maxCoeff(), 1e-12);
  Eigen::VectorXd p = Eigen::VectorXd::Ones(7);
  p(3) = -1.0;
  EXPECT_EQ(alt.signs, p);
  EXPECT_EQ(alt.h1, p.cwiseProduct(h0));

  const Eigen::MatrixXd& v = dec.eigenvectors;
  const Eigen::MatrixXd y0 = v * h0.asDiagonal() * v.transpose() * x0;
  const Eigen::MatrixXd y1 = v * alt.h1.asDiagonal() * v.transpose() * alt.x1;
  EXPECT_LT((y0 - y1).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_EQ((alt.x1.array() != 0.0).count(), (x0.array() != 0.0).count());
}

TEST(Alternative, IdentitySigns) {
  const SpectralDecomposition dec = eig_sym(adjacency_shift(fixtures::seven_node()));
  const Eigen::MatrixXd x0 = Eigen::MatrixXd::Random(7, 2);
  const Eigen::VectorXd h0 = Eigen::VectorXd::Random(7);
  const AlternativeSolution alt = construct_alternative(x0, h0, dec, Eigen::VectorXd::Ones(7));
  EXPECT_LT((alt.x1 - x0).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(alt.h1, h0);
}

TEST(Alternative, RejectsWrongEigenvector) {
  const SpectralDecomposition dec = eig_sym(adjacency_shift(fixtures::seven_node()));
  const Eigen::MatrixXd x0 = Eigen::MatrixXd::Ones(7, 1);
  const Eigen::VectorXd h0 = Eigen::VectorXd::Ones(7);
  EXPECT_THROW(construct_alternative(x0, h0, dec, 1, 3, 2), ContractError);
  EXPECT_THROW(construct_alternative(x0, h0, dec, Eigen::VectorXd::Constant(7, 0.5)), ContractError);
}

TEST(CheckC1, EmptyComplement) {
  const C1Result r = check_c1(Eigen::MatrixXd::Identity(3, 3), {0, 1, 2});
  EXPECT_EQ(r.rank, 0);
  EXPECT_FALSE(r.holds);
}

TEST(CheckC1, DuplicatedRowsInComplement) {
  Eigen::MatrixXd z(5, 3);
  z << 1, 1, 1,  //
      1, 0, 0,   //
      0, 1, 0,   //
      1, 0, 0,   //
      0, 1, 0;
  const C1Result r = check_c1(z, {0});
  EXPECT_EQ(r.rank, 2);
  EXPECT_TRUE(r.holds);
  EXPECT_FALSE(check_c1(z, {0, 2, 4}).holds);
  EXPECT_THROW(check_c1(z, {7}), ContractError);
}

TEST(CheckC2, EmptyComplementNeedsConstantRowSum) {
  // Z^T f_I = gamma 1 with f_I = sign(Z g0) fixed.
  Eigen::MatrixXd z = Eigen::MatrixXd::Identity(2, 2);
  const C2Result ok = check_c2(z, {0, 1}, Eigen::Vector2d(1, 1));
  EXPECT_TRUE(ok.holds);
  EXPECT_NEAR(ok.gamma, 1.0, 1e-9);
  const C2Result bad = check_c2(z, {0, 1}, Eigen::Vector2d(1, -1));
  EXPECT_FALSE(bad.holds);
  EXPECT_TRUE(std::isinf(bad.margin));
}

TEST(CheckC2, Preconditions) {
  Eigen::MatrixXd z(3, 2);
  z << 1, 0, 0, 1, 1, 1;
  EXPECT_THROW(check_c2(z, {0}, Eigen::Vector2d(1, 1)), ContractError);   // Z_{I^c} g0 != 0
  EXPECT_THROW(check_c2(z, {0, 1}, Eigen::Vector2d(0, 1)), ContractError);  // zero in Z_I g0
}

TEST(Certificate, CertifiedInstancesRecover) {
  int certified = 0, failures_seen = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t s = 4 + 4 * (seed % 5), p = 2 + 2 * (seed % 3);
    const Instance inst = generate_instance(GraphSource::random(10, 0.4), ShiftKind::normalized_adjacency,
                                            InstanceSpec{s, p, 4, 0.2}, 900 + seed);
    const Eigen::MatrixXd z = khatri_rao_z(inst.truth.y, inst.dec);
    const CertificateReport rep = certify(z, inst.truth.x0.vec_support(), inst.truth.g0);
    EXPECT_EQ(rep.c1_holds, rep.c1_rank == 9);
    if (rep.c2_holds) EXPECT_LT(rep.c2_margin, 1.0);
    const WeightedL1Solution sol = solve_weighted_l1({z, Eigen::VectorXd::Ones(z.rows())});
    const Eigen::VectorXd target = inst.truth.g0_normalized();
    const double err = (sol.g - target).norm() / target.norm();
    if (rep.certified()) {
      ++certified;
      EXPECT_LT(err, 1e-5) << "seed " << seed;
    }
    if (err > 0.1) {
      ++failures_seen;
      EXPECT_FALSE(rep.certified()) << "seed " << seed;
    }
  }
  EXPECT_GT(certified, 0);
  (void)failures_seen;
}
