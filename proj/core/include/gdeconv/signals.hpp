#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gdeconv/spectral.hpp"

namespace gdeconv {

// N x P input matrix together with its support {(i, j) : X_ij != 0}.
class SparseInputMatrix {
 public:
  SparseInputMatrix() = default;
  explicit SparseInputMatrix(Eigen::MatrixXd values);

  const Eigen::MatrixXd& values() const noexcept { return values_; }
  // (row, col) pairs in column-major order.
  const std::vector<std::pair<Eigen::Index, Eigen::Index>>& support() const noexcept {
    return support_;
  }
  // Support as indices into vec(X), ascending.
  std::vector<Eigen::Index> vec_support() const;
  std::size_t nnz() const noexcept { return support_.size(); }
  // Largest number of nonzeros in any column.
  std::size_t max_column_nnz() const;

 private:
  Eigen::MatrixXd values_;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> support_;
};

// X = Omega .* R with Omega i.i.d. Bernoulli(theta), R i.i.d. N(0, 1).
SparseInputMatrix bernoulli_gaussian(std::size_t n, std::size_t p_cols, double theta,
                                     std::uint64_t seed);

// Exactly `s` nonzeros placed uniformly without replacement over the N x P
// grid, with standard Gaussian values.
SparseInputMatrix fixed_sparsity_inputs(std::size_t n, std::size_t p_cols, std::size_t s,
                                        std::uint64_t seed);

struct FilterDraw {
  FilterSpec filter;          // coefficients and response on the given shift
  std::size_t redraws = 0;    // rejected non-invertible draws
};

inline constexpr std::size_t kFilterRedrawBudget = 100;

// h0 = (e1 + alpha b) / ||e1 + alpha b||_1 with b ~ N(0, I_L), redrawn while
// the response on `dec` is not invertible. Throws SingularFilterError after
// `budget` attempts.
FilterDraw make_filter(std::size_t order, double alpha, std::uint64_t seed,
                       const SpectralDecomposition& dec,
                       std::size_t budget = kFilterRedrawBudget);

struct GroundTruth {
  SparseInputMatrix x0;
  FilterSpec h0;
  Eigen::VectorXd g0;  // 1 ./ h~0, not normalized
  Eigen::MatrixXd y;   // H0 X0

  // The convex program fixes 1^T g = 1, so a perfect solve returns
  // g0 / g0_sum() and X0 / g0_sum().
  double g0_sum() const { return g0.sum(); }
  double g0_l1() const { return g0.lpNorm<1>(); }
  Eigen::VectorXd g0_normalized() const { return g0 / g0_sum(); }
};

// Y = V diag(h~0) V^T X0. Throws SingularFilterError for non-invertible h0.
GroundTruth synthesize(const SparseInputMatrix& x0, const FilterSpec& h0,
                       const SpectralDecomposition& dec);

}  // namespace gdeconv
