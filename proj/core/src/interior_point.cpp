#include "gdeconv/interior_point.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "gdeconv/error.hpp"

namespace gdeconv::lp {

const char* to_string(IpmStatus status) noexcept {
  switch (status) {
    case IpmStatus::optimal:
      return "optimal";
    case IpmStatus::max_iterations:
      return "max_iterations";
    case IpmStatus::numerical_failure:
      return "numerical_failure";
  }
  return "numerical_failure";
}

namespace {

struct Direction {
  Eigen::VectorXd dx, dy, ds, dz;
};

// Largest alpha in [0, 1] keeping v + alpha * dv >= 0.
double max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
  double alpha = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv(i) < 0.0) alpha = std::min(alpha, -v(i) / dv(i));
  }
  return alpha;
}

class NewtonSolver {
 public:
  NewtonSolver(LpStructure& st, const Eigen::VectorXd& s, const Eigen::VectorXd& z)
      : st_(st), s_(s), z_(z), d_(z.cwiseQuotient(s)) {}

  bool factor() { return st_.factor(d_); }

  //   A^T dy + G^T dz = -rx
  //   A dx            = -ry
  //   G dx + ds       = -rz
  //   z.ds + s.dz     = -rc
  Direction solve(const Eigen::VectorXd& rx, const Eigen::VectorXd& ry, const Eigen::VectorXd& rz,
                  const Eigen::VectorXd& rc) const {
    Direction dir = solve_once(rx, ry, rz, rc);
    // One step of iterative refinement on the full system.
    const Eigen::VectorXd ex = st_.apply_at(dir.dy) + st_.apply_gt(dir.dz) + rx;
    const Eigen::VectorXd ey = st_.apply_a(dir.dx) + ry;
    const Eigen::VectorXd ez = st_.apply_g(dir.dx) + dir.ds + rz;
    const Eigen::VectorXd ec = z_.cwiseProduct(dir.ds) + s_.cwiseProduct(dir.dz) + rc;
    Direction corr = solve_once(ex, ey, ez, ec);
    dir.dx += corr.dx;
    dir.dy += corr.dy;
    dir.ds += corr.ds;
    dir.dz += corr.dz;
    return dir;
  }

 private:
  Direction solve_once(const Eigen::VectorXd& rx, const Eigen::VectorXd& ry,
                       const Eigen::VectorXd& rz, const Eigen::VectorXd& rc) const {
    const Eigen::VectorXd rc_over_s = rc.cwiseQuotient(s_);
    const Eigen::VectorXd r1 = -rx - st_.apply_gt(d_.cwiseProduct(rz) - rc_over_s);
    const Eigen::VectorXd r2 = -ry;
    Direction dir;
    st_.solve(r1, r2, dir.dx, dir.dy);
    dir.dz = d_.cwiseProduct(st_.apply_g(dir.dx) + rz) - rc_over_s;
    dir.ds = -(rc + s_.cwiseProduct(dir.dz)).cwiseQuotient(z_);
    return dir;
  }

  LpStructure& st_;
  const Eigen::VectorXd& s_;
  const Eigen::VectorXd& z_;
  Eigen::VectorXd d_;
};

// Shift v into the positive orthant the way CVXOPT does for its default start.
void make_positive(Eigen::VectorXd& v) {
  if (v.size() == 0) return;
  const double worst = -v.minCoeff();
  if (worst >= -1e-8 * std::max(1.0, v.norm())) v.array() += 1.0 + worst;
}

bool finite(const Eigen::VectorXd& v) { return v.allFinite(); }

}  // namespace

IpmResult solve(LpStructure& st, const LpData& data, const IpmSettings& settings) {
  const Eigen::Index n = st.num_variables();
  const Eigen::Index m = st.num_inequalities();
  const Eigen::Index p = st.num_equalities();
  if (data.c.size() != n || data.h.size() != m || data.b.size() != p) {
    throw ContractError("lp::solve: data dimensions do not match the problem structure");
  }
  if (m == 0) throw ContractError("lp::solve: problem has no inequality constraints");

  const double res_y0 = std::max(1.0, data.b.norm());
  const double res_z0 = std::max(1.0, data.h.norm());
  const double res_x0 = std::max(1.0, data.c.norm());

  IpmResult out;
  out.status = IpmStatus::numerical_failure;

  // Starting point: least-norm slacks and multipliers.
  Eigen::VectorXd x, y, s, z;
  {
    if (!st.factor(Eigen::VectorXd::Ones(m))) return out;
    Eigen::VectorXd ytmp;
    st.solve(st.apply_gt(data.h), data.b, x, ytmp);
    s = data.h - st.apply_g(x);
    Eigen::VectorXd u;
    st.solve(-data.c, Eigen::VectorXd::Zero(p), u, y);
    z = st.apply_g(u);
    make_positive(s);
    make_positive(z);
  }

  Eigen::VectorXd best_x = x, best_y = y, best_s = s, best_z = z;
  double best_merit = std::numeric_limits<double>::infinity();

  for (int iter = 0;; ++iter) {
    const Eigen::VectorXd rx = st.apply_at(y) + st.apply_gt(z) + data.c;
    const Eigen::VectorXd ry = st.apply_a(x) - data.b;
    const Eigen::VectorXd rz = st.apply_g(x) + s - data.h;
    const double pcost = data.c.dot(x);
    const double dcost = -data.b.dot(y) - data.h.dot(z);
    const double sz = s.dot(z);
    const double gap = std::max(sz, pcost - dcost);
    const double pres = std::max(ry.size() ? ry.norm() / res_y0 : 0.0, rz.norm() / res_z0);
    const double dres = rx.norm() / res_x0;

    if (!(std::isfinite(pcost) && std::isfinite(dcost) && std::isfinite(gap))) break;

    const double merit = std::max({gap / (1.0 + std::abs(pcost)), pres, dres});
    if (merit < best_merit) {
      best_merit = merit;
      best_x = x;
      best_y = y;
      best_s = s;
      best_z = z;
      out.primal_objective = pcost;
      out.dual_objective = dcost;
      out.gap = gap;
      out.primal_residual = pres;
      out.dual_residual = dres;
      out.iterations = iter;
    }

    if (pres <= settings.feas_tol && dres <= settings.feas_tol &&
        gap <= settings.gap_tol * (1.0 + std::abs(pcost))) {
      out.status = IpmStatus::optimal;
      out.iterations = iter;
      break;
    }
    if (iter >= settings.max_iterations) {
      out.status = IpmStatus::max_iterations;
      out.iterations = iter;
      break;
    }

    NewtonSolver newton(st, s, z);
    if (!newton.factor()) break;

    const double mu = sz / static_cast<double>(m);

    // Predictor.
    const Eigen::VectorXd rc_aff = s.cwiseProduct(z);
    const Direction aff = newton.solve(rx, ry, rz, rc_aff);
    if (!finite(aff.dx) || !finite(aff.ds) || !finite(aff.dz)) break;
    const double alpha_aff = std::min(max_step(s, aff.ds), max_step(z, aff.dz));
    const double mu_aff =
        (s + alpha_aff * aff.ds).dot(z + alpha_aff * aff.dz) / static_cast<double>(m);
    const double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);

    // Corrector.
    const Eigen::VectorXd rc =
        rc_aff + aff.ds.cwiseProduct(aff.dz) - Eigen::VectorXd::Constant(m, sigma * mu);
    const Direction dir = newton.solve(rx, ry, rz, rc);
    if (!finite(dir.dx) || !finite(dir.dy) || !finite(dir.ds) || !finite(dir.dz)) break;
    const double alpha =
        std::min(1.0, settings.step_fraction * std::min(max_step(s, dir.ds), max_step(z, dir.dz)));

    x += alpha * dir.dx;
    y += alpha * dir.dy;
    s += alpha * dir.ds;
    z += alpha * dir.dz;
  }

  if (out.status == IpmStatus::optimal) {
    out.x = std::move(x);
    out.y = std::move(y);
    out.s = std::move(s);
    out.z = std::move(z);
  } else {
    out.x = std::move(best_x);
    out.y = std::move(best_y);
    out.s = std::move(best_s);
    out.z = std::move(best_z);
  }
  if (out.status == IpmStatus::optimal) {
    out.primal_objective = data.c.dot(out.x);
    out.dual_objective = -data.b.dot(out.y) - data.h.dot(out.z);
    out.gap = std::max(out.s.dot(out.z), out.primal_objective - out.dual_objective);
    out.primal_residual =
        std::max(p ? (st.apply_a(out.x) - data.b).norm() / res_y0 : 0.0,
                 (st.apply_g(out.x) + out.s - data.h).norm() / res_z0);
    out.dual_residual = (st.apply_at(out.y) + st.apply_gt(out.z) + data.c).norm() / res_x0;
  }
  return out;
}

DenseLp::DenseLp(Eigen::MatrixXd g, Eigen::MatrixXd a) : g_(std::move(g)), a_(std::move(a)) {
  if (a_.size() != 0 && a_.cols() != g_.cols()) {
    throw ContractError("DenseLp: G and A must have the same number of columns");
  }
  if (a_.size() == 0) a_.resize(0, g_.cols());
}

bool DenseLp::factor(const Eigen::VectorXd& d) {
  const Eigen::Index n = g_.cols();
  const Eigen::Index p = a_.rows();
  kkt_.setZero(n + p, n + p);
  const Eigen::MatrixXd scaled = d.cwiseSqrt().asDiagonal() * g_;
  kkt_.topLeftCorner(n, n).noalias() = scaled.transpose() * scaled;
  kkt_.bottomLeftCorner(p, n) = a_;
  kkt_.topRightCorner(n, p) = a_.transpose();
  if (!kkt_.allFinite()) return false;
  lu_.compute(kkt_);
  return true;
}

void DenseLp::solve(const Eigen::VectorXd& r1, const Eigen::VectorXd& r2, Eigen::VectorXd& dx,
                    Eigen::VectorXd& dy) const {
  const Eigen::Index n = g_.cols();
  const Eigen::Index p = a_.rows();
  Eigen::VectorXd rhs(n + p);
  rhs << r1, r2;
  const Eigen::VectorXd sol = lu_.solve(rhs);
  dx = sol.head(n);
  dy = sol.tail(p);
}

}  // namespace gdeconv::lp
