#include "gdeconv/identifiability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "gdeconv/error.hpp"
#include "gdeconv/interior_point.hpp"

namespace gdeconv {

Eigen::VectorXd pair_vector(Eigen::Index n, Eigen::Index i, Eigen::Index j) {
  if (i < 0 || j < 0 || i >= n || j >= n || i == j) {
    throw ParameterError("pair_vector: need distinct nodes in [0, n)");
  }
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  u(i) = 1.0 / std::sqrt(2.0);
  u(j) = -1.0 / std::sqrt(2.0);
  return u;
}

AmbiguityReport detect_ambiguities(const Eigen::MatrixXd& s) {
  if (s.rows() != s.cols()) throw ContractError("detect_ambiguities: shift must be square");
  const Eigen::Index n = s.rows();
  const double tol = 1e-10 * std::max(1.0, n ? s.cwiseAbs().maxCoeff() : 0.0);
  AmbiguityReport report;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      // (S u)_k = (S_ki - S_kj) / sqrt(2) must vanish off {i, j}.
      bool twin = true;
      for (Eigen::Index k = 0; k < n && twin; ++k) {
        if (k != i && k != j && std::abs(s(k, i) - s(k, j)) > tol) twin = false;
      }
      if (!twin) continue;
      const double lam_i = s(i, i) - s(i, j);
      const double lam_j = s(j, j) - s(j, i);
      if (std::abs(lam_i - lam_j) > tol) continue;
      report.pairs.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                              0.5 * (lam_i + lam_j)});
    }
  }
  return report;
}

AmbiguityReport detect_ambiguities(const ShiftOperator& shift) {
  return detect_ambiguities(shift.matrix());
}

std::optional<Eigen::Index> find_pair_eigenvector(const SpectralDecomposition& dec, Eigen::Index i,
                                                  Eigen::Index j, double tol) {
  const Eigen::VectorXd u = pair_vector(dec.size(), i, j);
  for (Eigen::Index k = 0; k < dec.size(); ++k) {
    const auto v = dec.eigenvectors.col(k);
    const double err = std::min((v - u).cwiseAbs().maxCoeff(), (v + u).cwiseAbs().maxCoeff());
    if (err <= tol) return k;
  }
  return std::nullopt;
}

std::pair<SpectralDecomposition, Eigen::Index> align_pair_eigenvector(
    const SpectralDecomposition& dec, Eigen::Index i, Eigen::Index j) {
  const Eigen::Index n = dec.size();
  const Eigen::VectorXd u = pair_vector(n, i, j);
  const auto& v = dec.eigenvectors;
  const Eigen::VectorXd& lam = dec.eigenvalues;

  // Rayleigh quotient of u under S = V diag(lam) V^T.
  const Eigen::VectorXd coords = v.transpose() * u;
  const double rayleigh = coords.cwiseAbs2().dot(lam);
  const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
  const Eigen::VectorXd su = v * lam.cwiseProduct(coords);
  if ((su - rayleigh * u).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw ContractError("u^(" + std::to_string(i) + "," + std::to_string(j) +
                        ") is not an eigenvector of the shift");
  }

  std::vector<Eigen::Index> block;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (std::abs(lam(k) - rayleigh) <= 1e-8 * scale) block.push_back(k);
  }
  if (block.empty()) throw NumericalError("align_pair_eigenvector: eigenvalue not found");

  SpectralDecomposition out = dec;
  const auto dim = static_cast<Eigen::Index>(block.size());
  Eigen::MatrixXd basis(n, dim);
  for (Eigen::Index c = 0; c < dim; ++c) basis.col(c) = v.col(block[c]);

  out.eigenvectors.col(block[0]) = u;
  if (dim > 1) {
    const Eigen::MatrixXd rest = basis - u * (u.transpose() * basis);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(rest);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, dim - 1);
    for (Eigen::Index c = 1; c < dim; ++c) {
      Eigen::VectorXd col = q.col(c - 1);
      Eigen::Index pick = 0;
      const double peak = col.cwiseAbs().maxCoeff();
      while (pick < n && std::abs(col(pick)) < peak - 1e-10) ++pick;
      if (col(pick) < 0.0) col = -col;
      out.eigenvectors.col(block[c]) = col;
    }
  }
  return {std::move(out), block[0]};
}

AlternativeSolution construct_alternative(const Eigen::MatrixXd& x0, const Eigen::VectorXd& h0,
                                          const SpectralDecomposition& dec,
                                          const Eigen::VectorXd& signs) {
  const Eigen::Index n = dec.size();
  if (x0.rows() != n || h0.size() != n || signs.size() != n) {
    throw ContractError("construct_alternative: dimension mismatch");
  }
  if (!(signs.array().abs() == 1.0).all()) {
    throw ContractError("construct_alternative: signs must be +-1");
  }
  AlternativeSolution alt;
  alt.signs = signs;
  alt.permutation = dec.eigenvectors * signs.asDiagonal() * dec.eigenvectors.transpose();
  alt.x1 = alt.permutation * x0;
  alt.h1 = signs.cwiseProduct(h0);
  return alt;
}

AlternativeSolution construct_alternative(const Eigen::MatrixXd& x0, const Eigen::VectorXd& h0,
                                          const SpectralDecomposition& dec, Eigen::Index i,
                                          Eigen::Index j, Eigen::Index k) {
  const Eigen::Index n = dec.size();
  if (k < 0 || k >= n) throw ContractError("construct_alternative: eigenvector index out of range");
  if (x0.rows() != n || h0.size() != n) {
    throw ContractError("construct_alternative: dimension mismatch");
  }
  const Eigen::VectorXd u = pair_vector(n, i, j);
  const auto v = dec.eigenvectors.col(k);
  if (std::min((v - u).cwiseAbs().maxCoeff(), (v + u).cwiseAbs().maxCoeff()) > 1e-8) {
    throw ContractError("construct_alternative: eigenvector " + std::to_string(k) +
                        " is not +-u^(" + std::to_string(i) + "," + std::to_string(j) + ")");
  }
  AlternativeSolution alt;
  alt.signs = Eigen::VectorXd::Ones(n);
  alt.signs(k) = -1.0;
  // I - 2 u u^T, written as the exact row swap so zeros stay zeros.
  alt.permutation = Eigen::MatrixXd::Identity(n, n);
  alt.permutation.row(i).swap(alt.permutation.row(j));
  alt.x1 = x0;
  alt.x1.row(i).swap(alt.x1.row(j));
  alt.h1 = alt.signs.cwiseProduct(h0);
  return alt;
}

namespace {

// Splits row indices of Z into the support I (as given) and its complement.
std::vector<Eigen::Index> complement_of(const std::vector<Eigen::Index>& support, Eigen::Index m) {
  std::vector<char> in(static_cast<std::size_t>(m), 0);
  for (Eigen::Index r : support) {
    if (r < 0 || r >= m) {
      throw ContractError("support index " + std::to_string(r) + " outside [0, " +
                          std::to_string(m) + ")");
    }
    if (in[static_cast<std::size_t>(r)]) {
      throw ContractError("support index " + std::to_string(r) + " repeated");
    }
    in[static_cast<std::size_t>(r)] = 1;
  }
  std::vector<Eigen::Index> out;
  for (Eigen::Index r = 0; r < m; ++r) {
    if (!in[static_cast<std::size_t>(r)]) out.push_back(r);
  }
  return out;
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& z, const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), z.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = z.row(rows[r]);
  return out;
}

// Variables x = (f in R^m, gamma, tau) with the box constraints
//   f - tau <= 0,  -f - tau <= 0
// and dense equalities A x = b. The f block of G^T D G is diagonal, so it is
// eliminated and a (p + 2) x (p + 2) system remains.
class BoxEpigraph final : public lp::LpStructure {
 public:
  BoxEpigraph(Eigen::Index m, Eigen::MatrixXd a) : m_(m), a_(std::move(a)) {}

  Eigen::Index num_variables() const override { return m_ + 2; }
  Eigen::Index num_inequalities() const override { return 2 * m_; }
  Eigen::Index num_equalities() const override { return a_.rows(); }

  Eigen::VectorXd apply_g(const Eigen::VectorXd& x) const override {
    const auto f = x.head(m_);
    const double tau = x(m_ + 1);
    Eigen::VectorXd out(2 * m_);
    out.head(m_) = f.array() - tau;
    out.tail(m_) = -f.array() - tau;
    return out;
  }

  Eigen::VectorXd apply_gt(const Eigen::VectorXd& v) const override {
    const auto v1 = v.head(m_);
    const auto v2 = v.tail(m_);
    Eigen::VectorXd out(m_ + 2);
    out.head(m_) = v1 - v2;
    out(m_) = 0.0;
    out(m_ + 1) = -(v1.sum() + v2.sum());
    return out;
  }

  Eigen::VectorXd apply_a(const Eigen::VectorXd& x) const override { return a_ * x; }
  Eigen::VectorXd apply_at(const Eigen::VectorXd& y) const override {
    return a_.transpose() * y;
  }

  bool factor(const Eigen::VectorXd& d) override {
    const Eigen::Index p = a_.rows();
    const auto d1 = d.head(m_).array();
    const auto d2 = d.tail(m_).array();
    dsum_ = d1 + d2;
    ddiff_ = d2 - d1;
    const Eigen::ArrayXd inv = dsum_.inverse();
    const auto af = a_.leftCols(m_);
    const Eigen::VectorXd ag = a_.col(m_);
    const Eigen::VectorXd at = a_.col(m_ + 1);
    coupling_ = at - af * (ddiff_ * inv).matrix();

    // Unknowns ordered (dgamma, dtau, dy).
    reduced_.setZero(p + 2, p + 2);
    reduced_(1, 1) = (4.0 * d1 * d2 * inv).sum();
    reduced_.block(0, 2, 1, p) = ag.transpose();
    reduced_.block(1, 2, 1, p) = coupling_.transpose();
    reduced_.block(2, 0, p, 1) = ag;
    reduced_.block(2, 1, p, 1) = coupling_;
    const Eigen::MatrixXd scaled = af * inv.sqrt().matrix().asDiagonal();
    reduced_.block(2, 2, p, p).noalias() = -scaled * scaled.transpose();
    if (!reduced_.allFinite()) return false;
    lu_.compute(reduced_);
    return true;
  }

  void solve(const Eigen::VectorXd& r1, const Eigen::VectorXd& r2, Eigen::VectorXd& dx,
             Eigen::VectorXd& dy) const override {
    const Eigen::Index p = a_.rows();
    const Eigen::ArrayXd rf = r1.head(m_).array();
    const auto af = a_.leftCols(m_);
    const Eigen::VectorXd rf_scaled = (rf / dsum_).matrix();
    Eigen::VectorXd rhs(p + 2);
    rhs(0) = r1(m_);
    rhs(1) = r1(m_ + 1) - (ddiff_ * rf / dsum_).sum();
    rhs.tail(p) = r2 - af * rf_scaled;
    const Eigen::VectorXd sol = lu_.solve(rhs);
    const double dtau = sol(1);
    dy = sol.tail(p);
    dx.resize(m_ + 2);
    dx.head(m_) = ((rf - ddiff_ * dtau - (af.transpose() * dy).array()) / dsum_).matrix();
    dx(m_) = sol(0);
    dx(m_ + 1) = dtau;
  }

 private:
  Eigen::Index m_;
  Eigen::MatrixXd a_;
  Eigen::ArrayXd dsum_;
  Eigen::ArrayXd ddiff_;
  Eigen::VectorXd coupling_;
  Eigen::MatrixXd reduced_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

constexpr double kGammaTol = 1e-8;
constexpr double kMarginSlack = 1e-6;

}  // namespace

C1Result check_c1(const Eigen::MatrixXd& z, const std::vector<Eigen::Index>& support) {
  const std::vector<Eigen::Index> rest = complement_of(support, z.rows());
  C1Result out;
  if (rest.empty()) return out;
  const Eigen::MatrixXd zc = take_rows(z, rest);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(zc);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return out;
  const double threshold = sv(0) * static_cast<double>(std::max(z.rows(), z.cols())) *
                           std::numeric_limits<double>::epsilon() * 64.0;
  out.rank = (sv.array() > threshold).count();
  out.holds = out.rank == z.cols() - 1;
  return out;
}

C2Result check_c2(const Eigen::MatrixXd& z, const std::vector<Eigen::Index>& support,
                  const Eigen::VectorXd& g0) {
  const Eigen::Index n = z.cols();
  if (g0.size() != n) throw ContractError("check_c2: g0 length mismatch");
  const std::vector<Eigen::Index> rest = complement_of(support, z.rows());
  const Eigen::MatrixXd zi = take_rows(z, support);
  const Eigen::MatrixXd zc = take_rows(z, rest);

  const Eigen::VectorXd on = zi * g0;
  const double on_scale = on.size() ? on.cwiseAbs().maxCoeff() : 0.0;
  if (!rest.empty() && (zc * g0).cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, on_scale)) {
    throw ContractError("check_c2: g0 does not vanish off the support");
  }
  if (on.size() && (on.cwiseAbs().array() <= 1e-12 * on_scale).any()) {
    throw ContractError("check_c2: Z_I g0 has zero entries; sign pattern is ambiguous");
  }
  const Eigen::VectorXd f_on = on.array().sign().matrix();
  const Eigen::VectorXd fixed = zi.transpose() * f_on;  // Z_I^T f_I
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);

  C2Result out;
  if (rest.empty()) {
    const double gamma = fixed.mean();
    const bool consistent = (fixed - gamma * ones).cwiseAbs().maxCoeff() <=
                            1e-9 * std::max(1.0, fixed.cwiseAbs().maxCoeff());
    out.margin = consistent ? 0.0 : std::numeric_limits<double>::infinity();
    out.gamma = consistent ? gamma : 0.0;
    out.holds = consistent && std::abs(gamma) > kGammaTol;
    return out;
  }

  // Z_c^T f_c - gamma 1 = -Z_I^T f_I.
  const auto m = static_cast<Eigen::Index>(rest.size());
  Eigen::MatrixXd eq(n, m + 1);
  eq.leftCols(m) = zc.transpose();
  eq.col(m) = -ones;
  const Eigen::VectorXd rhs = -fixed;

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(eq);
  const Eigen::VectorXd particular = cod.solve(rhs);
  if ((eq * particular - rhs).norm() > 1e-9 * std::max(1.0, rhs.norm())) {
    out.margin = std::numeric_limits<double>::infinity();
    return out;
  }

  // Keep a maximal independent set of equality rows.
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(eq.transpose());
  const Eigen::Index rank = qr.rank();
  Eigen::MatrixXd eq_red(rank, m + 2);
  Eigen::VectorXd rhs_red(rank);
  eq_red.setZero();
  for (Eigen::Index r = 0; r < rank; ++r) {
    const Eigen::Index row = qr.colsPermutation().indices()(r);
    eq_red.row(r).head(m + 1) = eq.row(row);
    rhs_red(r) = rhs(row);
  }

  // Stage 1: minimize tau.
  BoxEpigraph stage1(m, eq_red);
  lp::LpData data;
  data.c = Eigen::VectorXd::Zero(m + 2);
  data.c(m + 1) = 1.0;
  data.h = Eigen::VectorXd::Zero(2 * m);
  data.b = rhs_red;
  const lp::IpmResult r1 = lp::solve(stage1, data);
  if (r1.status != lp::IpmStatus::optimal) {
    throw NumericalError(std::string("check_c2: certificate LP ended with status ") +
                         lp::to_string(r1.status));
  }
  out.margin = r1.x.head(m).cwiseAbs().maxCoeff();
  out.gamma = r1.x(m);
  if (!(out.margin < 1.0 - kMarginSlack)) return out;
  if (std::abs(out.gamma) > kGammaTol) {
    out.holds = true;
    return out;
  }

  // Stage 2: push |gamma| away from zero inside a looser box. tau is pinned by
  // an extra equality row.
  out.stages = 2;
  const double bound = 0.5 * (1.0 + out.margin);
  Eigen::MatrixXd eq2(rank + 1, m + 2);
  eq2.topRows(rank) = eq_red;
  eq2.row(rank).setZero();
  eq2(rank, m + 1) = 1.0;
  Eigen::VectorXd rhs2(rank + 1);
  rhs2 << rhs_red, bound;

  double best_gamma = out.gamma;
  for (double direction : {1.0, -1.0}) {
    BoxEpigraph stage2(m, eq2);
    lp::LpData d2;
    d2.c = Eigen::VectorXd::Zero(m + 2);
    d2.c(m) = -direction;
    d2.h = Eigen::VectorXd::Zero(2 * m);
    d2.b = rhs2;
    const lp::IpmResult r2 = lp::solve(stage2, d2);
    if (r2.status != lp::IpmStatus::optimal) continue;
    if (std::abs(r2.x(m)) > std::abs(best_gamma)) best_gamma = r2.x(m);
  }
  out.gamma = best_gamma;
  out.holds = std::abs(best_gamma) > kGammaTol;
  return out;
}

CertificateReport certify(const Eigen::MatrixXd& z, const std::vector<Eigen::Index>& support,
                          const Eigen::VectorXd& g0) {
  CertificateReport report;
  const C1Result c1 = check_c1(z, support);
  report.c1_rank = c1.rank;
  report.c1_holds = c1.holds;
  const C2Result c2 = check_c2(z, support, g0);
  report.c2_margin = c2.margin;
  report.c2_gamma = c2.gamma;
  report.c2_holds = c2.holds;
  return report;
}

}  // namespace gdeconv
