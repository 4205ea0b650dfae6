#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "gdeconv/graphs.hpp"

namespace gdeconv {

// S = V diag(lambda) V^T with eigenvalues ascending. Each eigenvector is
// oriented so that its largest-magnitude entry (first one on ties) is positive.
struct SpectralDecomposition {
  Eigen::MatrixXd eigenvectors;
  Eigen::VectorXd eigenvalues;

  Eigen::Index size() const noexcept { return eigenvalues.size(); }
};

SpectralDecomposition eig_sym(const ShiftOperator& shift);
// Throws ContractError if `s` is not square and symmetric to 1e-12 relative.
SpectralDecomposition eig_sym(const Eigen::MatrixXd& s);

// N x L matrix with entry (i, j) = lambda_i^j, j = 0..L-1.
Eigen::MatrixXd vandermonde(const Eigen::VectorXd& eigenvalues, std::size_t order);

// h~ = Psi_L h, evaluated per eigenvalue with Horner's rule.
Eigen::VectorXd freq_response(const Eigen::VectorXd& coeffs, const SpectralDecomposition& dec);

// A shift-invariant graph filter described by its polynomial coefficients,
// its frequency response, or both.
class FilterSpec {
 public:
  static FilterSpec from_coeffs(Eigen::VectorXd coeffs);
  static FilterSpec from_response(Eigen::VectorXd response);
  // Both representations; they must agree (h~ = Psi_L h) to 1e-9.
  static FilterSpec from_both(Eigen::VectorXd coeffs, Eigen::VectorXd response,
                              const SpectralDecomposition& dec);

  const std::optional<Eigen::VectorXd>& coeffs() const noexcept { return coeffs_; }
  const std::optional<Eigen::VectorXd>& stored_response() const noexcept { return response_; }

  // Filter order L (number of coefficients); 0 when only a response is known.
  std::size_t order() const noexcept {
    return coeffs_ ? static_cast<std::size_t>(coeffs_->size()) : 0;
  }

  // The stored response when present, otherwise Psi_L h on `dec`.
  Eigen::VectorXd response(const SpectralDecomposition& dec) const;

 private:
  std::optional<Eigen::VectorXd> coeffs_;
  std::optional<Eigen::VectorXd> response_;
};

// V diag(h~) V^T X.
Eigen::MatrixXd apply_filter(const FilterSpec& filter, const SpectralDecomposition& dec,
                             const Eigen::MatrixXd& x);

// sum_l h_l S^l X by Horner's rule in S; no decomposition needed.
Eigen::MatrixXd apply_filter_polynomial(const Eigen::VectorXd& coeffs, const Eigen::MatrixXd& shift,
                                        const Eigen::MatrixXd& x);

// V diag(response) V^T, the filter as an explicit matrix.
Eigen::MatrixXd filter_matrix(const Eigen::VectorXd& response, const SpectralDecomposition& dec);

double default_invertibility_tol(const Eigen::VectorXd& response);

// min_i |h~_i| > tol; tol defaults to 1e-8 * max_i |h~_i|.
bool is_invertible(const Eigen::VectorXd& response, std::optional<double> tol = std::nullopt);
bool is_invertible(const FilterSpec& filter, const SpectralDecomposition& dec,
                   std::optional<double> tol = std::nullopt);

// g~ = 1 ./ h~. Throws SingularFilterError unless is_invertible(response).
Eigen::VectorXd inverse_response(const Eigen::VectorXd& response);
Eigen::VectorXd inverse_response(const FilterSpec& filter, const SpectralDecomposition& dec);

// Column-major vectorization: vec(X)[p * N + n] = X(n, p).
Eigen::VectorXd vec(const Eigen::MatrixXd& x);
Eigen::MatrixXd unvec(const Eigen::VectorXd& v, Eigen::Index rows, Eigen::Index cols);

// Z = Y^T V (.) V, the NP x N Khatri-Rao design matrix with
// Z g~ = vec(V diag(g~) V^T Y).
Eigen::MatrixXd khatri_rao_z(const Eigen::MatrixXd& y, const SpectralDecomposition& dec);

// Eigenvalues closer than 1e-9 * max|lambda| count as repeated.
std::size_t count_distinct_eigenvalues(const Eigen::VectorXd& eigenvalues);

struct CoefficientFit {
  Eigen::VectorXd coeffs;
  double residual = 0.0;  // ||Psi_L h - h~||_2
  Eigen::Index rank = 0;  // numerical rank of Psi_L
  std::optional<std::string> warning;
};

// Minimum-norm least-squares h for Psi_L h ~= h~.
CoefficientFit coeffs_from_response(const Eigen::VectorXd& response,
                                    const SpectralDecomposition& dec, std::size_t order);

}  // namespace gdeconv
