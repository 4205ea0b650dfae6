#include "gdeconv/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "gdeconv/error.hpp"

namespace gdeconv {

namespace {

void orient_columns(Eigen::MatrixXd& v) {
  for (Eigen::Index k = 0; k < v.cols(); ++k) {
    auto col = v.col(k);
    const double peak = col.cwiseAbs().maxCoeff();
    Eigen::Index pick = 0;
    while (pick < col.size() && std::abs(col(pick)) < peak - 1e-10 * std::max(1.0, peak)) ++pick;
    if (col(pick) < 0.0) col = -col;
  }
}

}  // namespace

SpectralDecomposition eig_sym(const Eigen::MatrixXd& s) {
  if (s.rows() != s.cols()) throw ContractError("eig_sym: matrix must be square");
  const double scale = s.size() ? std::max(1.0, s.cwiseAbs().maxCoeff()) : 1.0;
  if (s.size() && (s - s.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ContractError("eig_sym: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  if (es.info() != Eigen::Success) throw NumericalError("eig_sym: eigensolver did not converge");
  SpectralDecomposition dec{es.eigenvectors(), es.eigenvalues()};
  orient_columns(dec.eigenvectors);
  return dec;
}

SpectralDecomposition eig_sym(const ShiftOperator& shift) { return eig_sym(shift.matrix()); }

Eigen::MatrixXd vandermonde(const Eigen::VectorXd& eigenvalues, std::size_t order) {
  const Eigen::Index n = eigenvalues.size();
  const auto l = static_cast<Eigen::Index>(order);
  if (l < 1 || l > n) {
    throw ParameterError("vandermonde: order must lie in [1, " + std::to_string(n) + "]");
  }
  Eigen::MatrixXd psi(n, l);
  psi.col(0).setOnes();
  for (Eigen::Index j = 1; j < l; ++j) psi.col(j) = psi.col(j - 1).cwiseProduct(eigenvalues);
  return psi;
}

Eigen::VectorXd freq_response(const Eigen::VectorXd& coeffs, const SpectralDecomposition& dec) {
  if (coeffs.size() > dec.size()) {
    throw ParameterError("freq_response: filter order exceeds graph size");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dec.size());
  for (Eigen::Index l = coeffs.size() - 1; l >= 0; --l) {
    out = out.cwiseProduct(dec.eigenvalues).array() + coeffs(l);
  }
  return out;
}

FilterSpec FilterSpec::from_coeffs(Eigen::VectorXd coeffs) {
  if (coeffs.size() == 0) throw ParameterError("filter needs at least one coefficient");
  FilterSpec f;
  f.coeffs_ = std::move(coeffs);
  return f;
}

FilterSpec FilterSpec::from_response(Eigen::VectorXd response) {
  if (response.size() == 0) throw ParameterError("empty frequency response");
  FilterSpec f;
  f.response_ = std::move(response);
  return f;
}

FilterSpec FilterSpec::from_both(Eigen::VectorXd coeffs, Eigen::VectorXd response,
                                 const SpectralDecomposition& dec) {
  const Eigen::VectorXd expected = freq_response(coeffs, dec);
  if (expected.size() != response.size() ||
      (expected - response).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, expected.cwiseAbs().maxCoeff())) {
    throw ContractError("filter coefficients and frequency response disagree");
  }
  FilterSpec f;
  f.coeffs_ = std::move(coeffs);
  f.response_ = std::move(response);
  return f;
}

Eigen::VectorXd FilterSpec::response(const SpectralDecomposition& dec) const {
  if (response_) {
    if (response_->size() != dec.size()) {
      throw ContractError("frequency response length does not match the decomposition");
    }
    return *response_;
  }
  return freq_response(*coeffs_, dec);
}

Eigen::MatrixXd filter_matrix(const Eigen::VectorXd& response, const SpectralDecomposition& dec) {
  if (response.size() != dec.size()) throw ContractError("filter_matrix: size mismatch");
  const auto& v = dec.eigenvectors;
  return v * response.asDiagonal() * v.transpose();
}

Eigen::MatrixXd apply_filter(const FilterSpec& filter, const SpectralDecomposition& dec,
                             const Eigen::MatrixXd& x) {
  if (x.rows() != dec.size()) {
    throw ContractError("apply_filter: X has " + std::to_string(x.rows()) + " rows, graph has " +
                        std::to_string(dec.size()) + " nodes");
  }
  const auto& v = dec.eigenvectors;
  const Eigen::VectorXd h = filter.response(dec);
  return v * (h.asDiagonal() * (v.transpose() * x));
}

Eigen::MatrixXd apply_filter_polynomial(const Eigen::VectorXd& coeffs, const Eigen::MatrixXd& shift,
                                        const Eigen::MatrixXd& x) {
  if (shift.rows() != shift.cols() || x.rows() != shift.rows()) {
    throw ContractError("apply_filter_polynomial: dimension mismatch");
  }
  if (coeffs.size() == 0) return Eigen::MatrixXd::Zero(x.rows(), x.cols());
  Eigen::MatrixXd acc = coeffs(coeffs.size() - 1) * x;
  for (Eigen::Index l = coeffs.size() - 2; l >= 0; --l) acc = shift * acc + coeffs(l) * x;
  return acc;
}

double default_invertibility_tol(const Eigen::VectorXd& response) {
  return response.size() ? 1e-8 * response.cwiseAbs().maxCoeff() : 0.0;
}

bool is_invertible(const Eigen::VectorXd& response, std::optional<double> tol) {
  if (response.size() == 0) return false;
  const double t = tol.value_or(default_invertibility_tol(response));
  return response.cwiseAbs().minCoeff() > t;
}

bool is_invertible(const FilterSpec& filter, const SpectralDecomposition& dec,
                   std::optional<double> tol) {
  return is_invertible(filter.response(dec), tol);
}

Eigen::VectorXd inverse_response(const Eigen::VectorXd& response) {
  if (!is_invertible(response)) {
    throw SingularFilterError("filter frequency response vanishes at some graph frequency");
  }
  return response.cwiseInverse();
}

Eigen::VectorXd inverse_response(const FilterSpec& filter, const SpectralDecomposition& dec) {
  return inverse_response(filter.response(dec));
}

Eigen::VectorXd vec(const Eigen::MatrixXd& x) {
  return Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
}

Eigen::MatrixXd unvec(const Eigen::VectorXd& v, Eigen::Index rows, Eigen::Index cols) {
  if (rows * cols != v.size()) throw ContractError("unvec: size mismatch");
  return Eigen::Map<const Eigen::MatrixXd>(v.data(), rows, cols);
}

Eigen::MatrixXd khatri_rao_z(const Eigen::MatrixXd& y, const SpectralDecomposition& dec) {
  const Eigen::Index n = dec.size();
  if (y.rows() != n) {
    throw ContractError("khatri_rao_z: Y has " + std::to_string(y.rows()) + " rows, expected " +
                        std::to_string(n));
  }
  const Eigen::Index p = y.cols();
  const auto& v = dec.eigenvectors;
  const Eigen::MatrixXd ytv = y.transpose() * v;  // P x N, entry (p, i) = y_p . v_i
  Eigen::MatrixXd z(n * p, n);
  for (Eigen::Index c = 0; c < p; ++c) {
    z.middleRows(c * n, n) = v * ytv.row(c).asDiagonal();
  }
  return z;
}

std::size_t count_distinct_eigenvalues(const Eigen::VectorXd& eigenvalues) {
  if (eigenvalues.size() == 0) return 0;
  std::vector<double> lam(eigenvalues.data(), eigenvalues.data() + eigenvalues.size());
  std::sort(lam.begin(), lam.end());
  const double tol = 1e-9 * std::max(std::abs(lam.front()), std::abs(lam.back()));
  std::size_t distinct = 1;
  for (std::size_t i = 1; i < lam.size(); ++i) {
    if (lam[i] - lam[i - 1] > tol) ++distinct;
  }
  return distinct;
}

CoefficientFit coeffs_from_response(const Eigen::VectorXd& response,
                                    const SpectralDecomposition& dec, std::size_t order) {
  if (response.size() != dec.size()) throw ContractError("coeffs_from_response: size mismatch");
  const Eigen::MatrixXd psi = vandermonde(dec.eigenvalues, order);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(psi);
  CoefficientFit fit;
  fit.coeffs = cod.solve(response);
  fit.residual = (psi * fit.coeffs - response).norm();
  fit.rank = cod.rank();

  const std::size_t distinct = count_distinct_eigenvalues(dec.eigenvalues);
  if (fit.rank < psi.cols()) {
    fit.warning = "Vandermonde matrix is rank deficient (rank " + std::to_string(fit.rank) +
                  " < order " + std::to_string(order) + "); minimum-norm coefficients returned";
  } else if (distinct < static_cast<std::size_t>(dec.size())) {
    fit.warning = "shift has repeated eigenvalues (" + std::to_string(distinct) + " distinct of " +
                  std::to_string(dec.size()) + "); the response is only fit in least squares";
  }
  return fit;
}

}  // namespace gdeconv
