#include "gdeconv/signals.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

#include "gdeconv/error.hpp"
#include "gdeconv/rng.hpp"

namespace gdeconv {

SparseInputMatrix::SparseInputMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
  for (Eigen::Index j = 0; j < values_.cols(); ++j) {
    for (Eigen::Index i = 0; i < values_.rows(); ++i) {
      if (values_(i, j) != 0.0) support_.emplace_back(i, j);
    }
  }
}

std::vector<Eigen::Index> SparseInputMatrix::vec_support() const {
  std::vector<Eigen::Index> out;
  out.reserve(support_.size());
  for (const auto& [i, j] : support_) out.push_back(j * values_.rows() + i);
  return out;
}

std::size_t SparseInputMatrix::max_column_nnz() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(values_.cols()), 0);
  for (const auto& entry : support_) ++counts[static_cast<std::size_t>(entry.second)];
  return counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
}

SparseInputMatrix bernoulli_gaussian(std::size_t n, std::size_t p_cols, double theta,
                                     std::uint64_t seed) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw ParameterError("theta must lie in [0, 1]");
  Rng rng(seed);
  std::bernoulli_distribution mask(theta);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(p_cols));
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      // Draw both so the value stream does not depend on the mask.
      const bool on = mask(rng);
      const double v = gauss(rng);
      if (on) x(i, j) = v;
    }
  }
  return SparseInputMatrix(std::move(x));
}

SparseInputMatrix fixed_sparsity_inputs(std::size_t n, std::size_t p_cols, std::size_t s,
                                        std::uint64_t seed) {
  const std::size_t total = n * p_cols;
  if (s == 0 || s > total) {
    throw ParameterError("sparsity s=" + std::to_string(s) + " must lie in [1, " +
                         std::to_string(total) + "]");
  }
  Rng rng(seed);
  std::vector<std::size_t> cells(total);
  std::iota(cells.begin(), cells.end(), std::size_t{0});
  // Partial Fisher-Yates: the first s cells are a uniform sample.
  for (std::size_t k = 0; k < s; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, total - 1);
    std::swap(cells[k], cells[pick(rng)]);
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(p_cols));
  for (std::size_t k = 0; k < s; ++k) {
    double v = 0.0;
    while (v == 0.0) v = gauss(rng);
    x(static_cast<Eigen::Index>(cells[k] % n), static_cast<Eigen::Index>(cells[k] / n)) = v;
  }
  return SparseInputMatrix(std::move(x));
}

FilterDraw make_filter(std::size_t order, double alpha, std::uint64_t seed,
                       const SpectralDecomposition& dec, std::size_t budget) {
  if (order < 1) throw ParameterError("filter order must be at least 1");
  if (order > static_cast<std::size_t>(dec.size())) {
    throw ParameterError("filter order exceeds the number of nodes");
  }
  if (!(alpha >= 0.0)) throw ParameterError("alpha must be non-negative");
  if (budget == 0) throw ParameterError("filter redraw budget must be positive");

  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto l = static_cast<Eigen::Index>(order);
  for (std::size_t attempt = 0; attempt < budget; ++attempt) {
    Eigen::VectorXd h = Eigen::VectorXd::Zero(l);
    for (Eigen::Index k = 0; k < l; ++k) h(k) = alpha * gauss(rng);
    h(0) += 1.0;
    const double norm = h.lpNorm<1>();
    if (!(norm > 0.0)) continue;
    h /= norm;
    Eigen::VectorXd response = freq_response(h, dec);
    if (is_invertible(response)) {
      return {FilterSpec::from_both(std::move(h), std::move(response), dec), attempt};
    }
  }
  throw SingularFilterError("no invertible filter after " + std::to_string(budget) +
                            " draws (alpha=" + std::to_string(alpha) +
                            ", L=" + std::to_string(order) + ")");
}

GroundTruth synthesize(const SparseInputMatrix& x0, const FilterSpec& h0,
                       const SpectralDecomposition& dec) {
  if (x0.values().rows() != dec.size()) throw ContractError("synthesize: X0 row count mismatch");
  const Eigen::VectorXd response = h0.response(dec);
  GroundTruth gt;
  gt.g0 = inverse_response(response);
  gt.x0 = x0;
  gt.h0 = h0;
  gt.y = apply_filter(h0, dec, x0.values());
  return gt;
}

}  // namespace gdeconv
