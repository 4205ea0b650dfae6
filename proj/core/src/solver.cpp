#include "gdeconv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "gdeconv/error.hpp"

namespace gdeconv {

namespace {

// Variables x = (g, t) with g in R^N, t in R^M (M = NP).
//   G = [ Z  -I ]    h = 0,   A = [ 1^T  0 ],   b = 1,   c = (0, w).
//       [-Z  -I ]
// With D = diag(d1, d2) the t block of G^T D G is diagonal and is eliminated,
// leaving K = Z^T diag(4 d1 d2 / (d1 + d2)) Z bordered by the constraint row.
class L1Epigraph final : public lp::LpStructure {
 public:
  explicit L1Epigraph(const Eigen::MatrixXd& z) : z_(z), n_(z.cols()), m_(z.rows()) {}

  Eigen::Index num_variables() const override { return n_ + m_; }
  Eigen::Index num_inequalities() const override { return 2 * m_; }
  Eigen::Index num_equalities() const override { return 1; }

  Eigen::VectorXd apply_g(const Eigen::VectorXd& x) const override {
    const Eigen::VectorXd zg = z_ * x.head(n_);
    const auto t = x.tail(m_);
    Eigen::VectorXd out(2 * m_);
    out.head(m_) = zg - t;
    out.tail(m_) = -zg - t;
    return out;
  }

  Eigen::VectorXd apply_gt(const Eigen::VectorXd& v) const override {
    const auto v1 = v.head(m_);
    const auto v2 = v.tail(m_);
    Eigen::VectorXd out(n_ + m_);
    out.head(n_) = z_.transpose() * (v1 - v2);
    out.tail(m_) = -(v1 + v2);
    return out;
  }

  Eigen::VectorXd apply_a(const Eigen::VectorXd& x) const override {
    return Eigen::VectorXd::Constant(1, x.head(n_).sum());
  }

  Eigen::VectorXd apply_at(const Eigen::VectorXd& y) const override {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n_ + m_);
    out.head(n_).setConstant(y(0));
    return out;
  }

  bool factor(const Eigen::VectorXd& d) override {
    const auto d1 = d.head(m_).array();
    const auto d2 = d.tail(m_).array();
    dsum_ = d1 + d2;
    ddiff_ = d2 - d1;
    const Eigen::ArrayXd q = 4.0 * d1 * d2 / dsum_;
    scaled_ = q.sqrt().matrix().asDiagonal() * z_;
    bordered_.resize(n_ + 1, n_ + 1);
    bordered_.topLeftCorner(n_, n_).noalias() = scaled_.transpose() * scaled_;
    bordered_.col(n_).head(n_).setOnes();
    bordered_.row(n_).head(n_).setOnes();
    bordered_(n_, n_) = 0.0;
    if (!bordered_.allFinite()) return false;
    lu_.compute(bordered_);
    return true;
  }

  void solve(const Eigen::VectorXd& r1, const Eigen::VectorXd& r2, Eigen::VectorXd& dx,
             Eigen::VectorXd& dy) const override {
    const auto rg = r1.head(n_);
    const Eigen::ArrayXd rt = r1.tail(m_).array();
    Eigen::VectorXd rhs(n_ + 1);
    rhs.head(n_) = rg - z_.transpose() * (ddiff_ * rt / dsum_).matrix();
    rhs(n_) = r2(0);
    const Eigen::VectorXd sol = lu_.solve(rhs);
    dx.resize(n_ + m_);
    dx.head(n_) = sol.head(n_);
    dx.tail(m_) = ((rt - ddiff_ * (z_ * sol.head(n_)).array()) / dsum_).matrix();
    dy = sol.tail(1);
  }

 private:
  const Eigen::MatrixXd& z_;
  Eigen::Index n_;
  Eigen::Index m_;
  Eigen::ArrayXd dsum_;
  Eigen::ArrayXd ddiff_;
  Eigen::MatrixXd scaled_;
  Eigen::MatrixXd bordered_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

double weighted_l1(const Eigen::VectorXd& w, const Eigen::VectorXd& r) {
  return w.cwiseProduct(r.cwiseAbs()).sum();
}

}  // namespace

void L1Problem::validate() const {
  if (z.cols() == 0) throw ContractError("L1Problem: Z has no columns");
  if (z.rows() % z.cols() != 0) {
    throw ContractError("L1Problem: Z must have NP rows for N columns");
  }
  if (weights.size() != z.rows()) throw ContractError("L1Problem: weights must have NP entries");
  if (!(weights.array() > 0.0).all() || !weights.allFinite()) {
    throw ContractError("L1Problem: weights must be strictly positive and finite");
  }
  if (!z.allFinite()) throw ContractError("L1Problem: Z has non-finite entries");
}

WeightedL1Solution solve_weighted_l1(const L1Problem& problem, double tol) {
  problem.validate();
  if (!(tol > 0.0)) throw ParameterError("solve_weighted_l1: tol must be positive");
  const Eigen::Index n = problem.z.cols();
  const Eigen::Index m = problem.z.rows();

  L1Epigraph structure(problem.z);
  lp::LpData data;
  data.c = Eigen::VectorXd::Zero(n + m);
  data.c.tail(m) = problem.weights;
  data.h = Eigen::VectorXd::Zero(2 * m);
  data.b = Eigen::VectorXd::Ones(1);

  lp::IpmSettings settings;
  settings.gap_tol = tol;
  settings.feas_tol = std::max(tol, 1e-12);
  const lp::IpmResult r = lp::solve(structure, data, settings);

  WeightedL1Solution out;
  out.g = r.x.head(n);
  // Put the iterate exactly on the constraint plane; the shift is at the level
  // of the primal residual.
  out.g.array() += (1.0 - out.g.sum()) / static_cast<double>(n);
  out.objective = weighted_l1(problem.weights, problem.z * out.g);
  out.dual_objective = r.dual_objective;
  out.gap = std::max(0.0, out.objective - out.dual_objective);
  out.iterations = r.iterations;
  out.status = r.status;
  return out;
}

const char* to_string(SolveStatus status) noexcept {
  switch (status) {
    case SolveStatus::converged:
      return "converged";
    case SolveStatus::max_iters:
      return "max_iters";
    case SolveStatus::solver_failure:
      return "solver_failure";
  }
  return "solver_failure";
}

SolveStatus solve_status_from_string(const std::string& name) {
  if (name == "converged") return SolveStatus::converged;
  if (name == "max_iters") return SolveStatus::max_iters;
  if (name == "solver_failure") return SolveStatus::solver_failure;
  throw ParameterError("unknown solve status '" + name + "'");
}

void ReweightedOptions::validate() const {
  if (delta && !(*delta > 0.0)) throw ParameterError("delta must be positive");
  if (!(eps > 0.0)) throw ParameterError("eps must be positive");
  if (max_iters < 1) throw ParameterError("max_iters must be at least 1");
  if (!(inner_tol > 0.0)) throw ParameterError("inner tolerance must be positive");
}

Eigen::MatrixXd recover_inputs(const Eigen::MatrixXd& z, const Eigen::VectorXd& g) {
  if (g.size() != z.cols() || z.cols() == 0 || z.rows() % z.cols() != 0) {
    throw ContractError("recover_inputs: Z is " + std::to_string(z.rows()) + "x" +
                        std::to_string(z.cols()) + ", g has " + std::to_string(g.size()) +
                        " entries");
  }
  return unvec(z * g, z.cols(), z.rows() / z.cols());
}

DeconvolutionResult reweighted_l1(const Eigen::MatrixXd& z, const ReweightedOptions& options) {
  options.validate();
  if (z.cols() == 0 || z.rows() % z.cols() != 0) {
    throw ContractError("reweighted_l1: Z must be NP x N");
  }
  const Eigen::Index n = z.cols();
  const Eigen::Index m = z.rows();

  DeconvolutionResult result;
  L1Problem problem{z, Eigen::VectorXd::Ones(m)};
  Eigen::VectorXd x_prev = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd g_prev;
  result.status = SolveStatus::max_iters;

  for (int t = 0; t < options.max_iters; ++t) {
    const WeightedL1Solution sol = solve_weighted_l1(problem, options.inner_tol);
    const Eigen::VectorXd x_next = z * sol.g;

    IterationRecord rec;
    rec.objective = sol.objective;
    rec.previous_objective = t == 0 ? std::numeric_limits<double>::quiet_NaN()
                                    : weighted_l1(problem.weights, z * g_prev);
    rec.l1_norm = x_next.lpNorm<1>();
    rec.gap = sol.gap;
    rec.inner_iterations = sol.iterations;
    rec.relative_change = t == 0 ? std::numeric_limits<double>::quiet_NaN()
                                 : (x_next - x_prev).lpNorm<1>() / x_prev.lpNorm<1>();
    result.iterations.push_back(rec);

    result.g_tilde = sol.g;
    x_prev = x_next;
    g_prev = sol.g;

    if (sol.status != lp::IpmStatus::optimal) {
      result.status = SolveStatus::solver_failure;
      break;
    }
    if (t == 0) {
      result.delta = options.delta.value_or(1e-3 * std::max(1.0, x_next.lpNorm<Eigen::Infinity>()));
    }
    if (t > 0 && rec.relative_change <= options.eps) {
      result.status = SolveStatus::converged;
      break;
    }
    problem.weights = (x_next.cwiseAbs().array() + result.delta).inverse().matrix();
  }

  result.x_hat = recover_inputs(z, result.g_tilde);
  if (result.g_tilde.size() == n && (result.g_tilde.array().abs() > 1e-10).all()) {
    result.h_tilde = result.g_tilde.cwiseInverse();
  }
  return result;
}

double relative_error(const Eigen::MatrixXd& x_hat, const Eigen::MatrixXd& x0) {
  if (x_hat.rows() != x0.rows() || x_hat.cols() != x0.cols()) {
    throw ContractError("relative_error: shape mismatch");
  }
  const double ref = x0.norm();
  if (!(ref > 0.0)) throw ParameterError("relative_error: reference matrix is zero");
  const double energy = x_hat.squaredNorm();
  const double c = energy > 0.0 ? (x_hat.cwiseProduct(x0)).sum() / energy : 0.0;
  return (c * x_hat - x0).norm() / ref;
}

RecoveredFilter recover_filter(const Eigen::VectorXd& g, const SpectralDecomposition& dec,
                               std::size_t order) {
  if (g.size() != dec.size()) throw ContractError("recover_filter: size mismatch");
  if (!((g.array().abs() > 1e-10).all())) {
    throw SingularFilterError("recover_filter: inverse response has a (near-)zero entry");
  }
  RecoveredFilter out;
  out.response = g.cwiseInverse();
  CoefficientFit fit = coeffs_from_response(out.response, dec, order);
  out.coeffs = std::move(fit.coeffs);
  out.residual = fit.residual;
  out.warning = std::move(fit.warning);
  return out;
}

}  // namespace gdeconv
