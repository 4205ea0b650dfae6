#pragma once

#include <string>

#include <Eigen/Dense>

namespace gdeconv::lp {

// Linear program in inequality form
//
//   minimize    c^T x
//   subject to  G x <= h,   A x = b
//
// The constraint matrices are never handed to the solver directly; a
// structure object supplies the products with G and A and solves the reduced
// Newton system
//
//   [ G^T D G   A^T ] [dx]   [r1]
//   [ A         0   ] [dy] = [r2],     D = diag(d) > 0,
//
// so that problems with exploitable structure avoid dense n x n work.
class LpStructure {
 public:
  virtual ~LpStructure() = default;

  virtual Eigen::Index num_variables() const = 0;
  virtual Eigen::Index num_inequalities() const = 0;
  virtual Eigen::Index num_equalities() const = 0;

  virtual Eigen::VectorXd apply_g(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd apply_gt(const Eigen::VectorXd& z) const = 0;
  virtual Eigen::VectorXd apply_a(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd apply_at(const Eigen::VectorXd& y) const = 0;

  // Returns false if the reduced system could not be factored.
  virtual bool factor(const Eigen::VectorXd& d) = 0;
  virtual void solve(const Eigen::VectorXd& r1, const Eigen::VectorXd& r2, Eigen::VectorXd& dx,
                     Eigen::VectorXd& dy) const = 0;
};

struct LpData {
  Eigen::VectorXd c;
  Eigen::VectorXd h;
  Eigen::VectorXd b;
};

struct IpmSettings {
  // Stop once primal - dual objective <= gap_tol * (1 + |primal objective|)
  // and both relative residuals are below feas_tol.
  double gap_tol = 1e-9;
  double feas_tol = 1e-9;
  int max_iterations = 100;
  double step_fraction = 0.99;
};

enum class IpmStatus { optimal, max_iterations, numerical_failure };

const char* to_string(IpmStatus status) noexcept;

struct IpmResult {
  Eigen::VectorXd x;
  Eigen::VectorXd y;  // equality multipliers
  Eigen::VectorXd s;  // inequality slacks
  Eigen::VectorXd z;  // inequality multipliers
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double gap = 0.0;  // max(s^T z, primal - dual)
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
  IpmStatus status = IpmStatus::numerical_failure;
};

// Mehrotra predictor-corrector primal-dual interior-point method. The problem
// must be feasible and bounded; there is no infeasibility detection.
IpmResult solve(LpStructure& structure, const LpData& data, const IpmSettings& settings = {});

// Dense G and A. The reduced system is assembled explicitly and factored with
// partial-pivoting LU, so A should have full row rank.
class DenseLp final : public LpStructure {
 public:
  DenseLp(Eigen::MatrixXd g, Eigen::MatrixXd a);

  Eigen::Index num_variables() const override { return g_.cols(); }
  Eigen::Index num_inequalities() const override { return g_.rows(); }
  Eigen::Index num_equalities() const override { return a_.rows(); }

  Eigen::VectorXd apply_g(const Eigen::VectorXd& x) const override { return g_ * x; }
  Eigen::VectorXd apply_gt(const Eigen::VectorXd& z) const override { return g_.transpose() * z; }
  Eigen::VectorXd apply_a(const Eigen::VectorXd& x) const override { return a_ * x; }
  Eigen::VectorXd apply_at(const Eigen::VectorXd& y) const override { return a_.transpose() * y; }

  bool factor(const Eigen::VectorXd& d) override;
  void solve(const Eigen::VectorXd& r1, const Eigen::VectorXd& r2, Eigen::VectorXd& dx,
             Eigen::VectorXd& dy) const override;

 private:
  Eigen::MatrixXd g_;
  Eigen::MatrixXd a_;
  Eigen::MatrixXd kkt_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

}  // namespace gdeconv::lp
