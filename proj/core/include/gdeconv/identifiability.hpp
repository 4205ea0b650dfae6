#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gdeconv/graphs.hpp"
#include "gdeconv/spectral.hpp"

namespace gdeconv {

// u^(i,j): zero except u_i = -u_j = 1/sqrt(2).
Eigen::VectorXd pair_vector(Eigen::Index n, Eigen::Index i, Eigen::Index j);

struct AmbiguousPair {
  std::size_t i = 0;
  std::size_t j = 0;
  double eigenvalue = 0.0;
};

struct AmbiguityReport {
  std::vector<AmbiguousPair> pairs;  // i < j, lexicographic

  bool ambiguous() const noexcept { return !pairs.empty(); }
};

// Tests every unordered pair for S u^(i,j) = lambda u^(i,j) directly on S, so
// the result does not depend on how a degenerate eigenspace was resolved.
AmbiguityReport detect_ambiguities(const ShiftOperator& shift);
AmbiguityReport detect_ambiguities(const Eigen::MatrixXd& shift);

// Index k of the eigenvector equal to +-u^(i,j) within `tol`, if any.
std::optional<Eigen::Index> find_pair_eigenvector(const SpectralDecomposition& dec,
                                                  Eigen::Index i, Eigen::Index j,
                                                  double tol = 1e-8);

// When u^(i,j) is an eigenvector of a repeated eigenvalue the returned basis
// need not contain it. Rotates that eigenspace so that column k is u^(i,j)
// and returns the adjusted decomposition with k. Throws ContractError if
// u^(i,j) is not an eigenvector.
std::pair<SpectralDecomposition, Eigen::Index> align_pair_eigenvector(
    const SpectralDecomposition& dec, Eigen::Index i, Eigen::Index j);

struct AlternativeSolution {
  Eigen::MatrixXd x1;          // P X0
  Eigen::VectorXd h1;          // diag(p) h~0
  Eigen::MatrixXd permutation; // P = V diag(p) V^T
  Eigen::VectorXd signs;       // p
};

// General form with an explicit sign vector p in {-1, 1}^N.
AlternativeSolution construct_alternative(const Eigen::MatrixXd& x0, const Eigen::VectorXd& h0,
                                          const SpectralDecomposition& dec,
                                          const Eigen::VectorXd& signs);

// Flips eigenvector k, which must equal +-u^(i,j) within 1e-8; then
// P = I - 2 u u^T swaps nodes i and j.
AlternativeSolution construct_alternative(const Eigen::MatrixXd& x0, const Eigen::VectorXd& h0,
                                          const SpectralDecomposition& dec, Eigen::Index i,
                                          Eigen::Index j, Eigen::Index k);

struct C1Result {
  Eigen::Index rank = 0;
  bool holds = false;
};

// Numerical rank of Z restricted to the rows outside `support`, with singular
// value threshold sigma_max * max(NP, N) * eps * 64. Holds iff rank = N - 1.
C1Result check_c1(const Eigen::MatrixXd& z, const std::vector<Eigen::Index>& support);

struct C2Result {
  double margin = 0.0;  // min ||f_{I^c}||_inf; +inf when infeasible
  double gamma = 0.0;
  bool holds = false;
  int stages = 1;       // 2 when the gamma-maximizing LP ran
};

// Searches for f with Z^T f = gamma 1, f_I = sign(Z_I g0), ||f_{I^c}||_inf < 1,
// gamma != 0. Throws ContractError if Z_{I^c} g0 != 0 or Z_I g0 has zeros.
C2Result check_c2(const Eigen::MatrixXd& z, const std::vector<Eigen::Index>& support,
                  const Eigen::VectorXd& g0);

struct CertificateReport {
  Eigen::Index c1_rank = 0;
  bool c1_holds = false;
  double c2_margin = 0.0;
  double c2_gamma = 0.0;
  bool c2_holds = false;

  bool certified() const noexcept { return c1_holds && c2_holds; }
};

CertificateReport certify(const Eigen::MatrixXd& z, const std::vector<Eigen::Index>& support,
                          const Eigen::VectorXd& g0);

}  // namespace gdeconv
