#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gdeconv/interior_point.hpp"
#include "gdeconv/spectral.hpp"

namespace gdeconv {

// minimize ||w .* (Z g)||_1  subject to  1^T g = 1.
struct L1Problem {
  Eigen::MatrixXd z;        // NP x N
  Eigen::VectorXd weights;  // length NP, strictly positive

  // Throws ContractError on shape mismatch or non-positive weights.
  void validate() const;
};

struct WeightedL1Solution {
  Eigen::VectorXd g;
  double objective = 0.0;       // ||w .* (Z g)||_1 at the returned g
  double dual_objective = 0.0;  // certified lower bound on the optimum
  double gap = 0.0;
  int iterations = 0;
  lp::IpmStatus status = lp::IpmStatus::numerical_failure;
};

// Solves the epigraph LP
//   min sum_k w_k t_k  s.t.  -t <= Z g <= t,  1^T g = 1
// with a primal-dual interior-point method whose Newton systems reduce to an
// N x N Schur complement. `tol` bounds the duality gap relative to 1 + |opt|.
WeightedL1Solution solve_weighted_l1(const L1Problem& problem, double tol = 1e-9);

enum class SolveStatus { converged, max_iters, solver_failure };

const char* to_string(SolveStatus status) noexcept;
SolveStatus solve_status_from_string(const std::string& name);

struct IterationRecord {
  double objective = 0.0;           // weighted objective at g^(t+1) under w^(t)
  double previous_objective = 0.0;  // g^(t) under w^(t); NaN at t = 0
  double l1_norm = 0.0;             // ||X^(t+1)||_1
  double relative_change = 0.0;     // ||X^(t+1) - X^(t)||_1 / ||X^(t)||_1; NaN at t = 0
  double gap = 0.0;
  int inner_iterations = 0;
};

struct ReweightedOptions {
  // Smoothing in w_i = 1 / (|x_i| + delta). Unset means
  // 1e-3 * max(1, ||X^(1)||_inf), fixed after the first pass.
  std::optional<double> delta;
  double eps = 1e-4;
  int max_iters = 10;
  double inner_tol = 1e-9;

  void validate() const;
};

struct DeconvolutionResult {
  Eigen::VectorXd g_tilde;
  Eigen::MatrixXd x_hat;
  Eigen::VectorXd h_tilde;  // 1 ./ g_tilde; empty if some |g_i| <= 1e-10
  std::optional<Eigen::VectorXd> h_hat;
  std::vector<IterationRecord> iterations;
  SolveStatus status = SolveStatus::solver_failure;
  double delta = 0.0;
};

// Iteratively reweighted l1 minimization. N = Z.cols(), P = Z.rows() / N.
DeconvolutionResult reweighted_l1(const Eigen::MatrixXd& z, const ReweightedOptions& options = {});

// unvec(Z g) as an N x P matrix.
Eigen::MatrixXd recover_inputs(const Eigen::MatrixXd& z, const Eigen::VectorXd& g);

// min_c ||c X_hat - X0||_F / ||X0||_F. Throws ParameterError if X0 = 0.
double relative_error(const Eigen::MatrixXd& x_hat, const Eigen::MatrixXd& x0);

// The two representations agree only up to the least-squares residual, so
// they are kept apart rather than packed into one FilterSpec.
struct RecoveredFilter {
  Eigen::VectorXd response;  // 1 ./ g
  Eigen::VectorXd coeffs;    // minimum-norm fit of order L
  double residual = 0.0;
  std::optional<std::string> warning;
};

// Throws SingularFilterError if some |g_i| <= 1e-10.
RecoveredFilter recover_filter(const Eigen::VectorXd& g, const SpectralDecomposition& dec,
                               std::size_t order);

}  // namespace gdeconv
