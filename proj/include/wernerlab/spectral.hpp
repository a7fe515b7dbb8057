#pragma once

// Schatten norms and related spectral quantities.  Every norm goes through
// the singular values; the entrywise Frobenius sum is only used by tests.

#include "wernerlab/tensorspace.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace wernerlab {

/// Schatten index for the operator norm.
inline constexpr double kOperatorNorm = std::numeric_limits<double>::infinity();

/// Singular values in descending order.
inline Eigen::VectorXd singular_values(const Matrix& m) {
  if (m.size() == 0) return Eigen::VectorXd();
  if (m.rows() == 1 || m.cols() == 1) {
    Eigen::VectorXd s(1);
    s(0) = m.norm();
    return s;
  }
  if (std::max(m.rows(), m.cols()) <= 16) return Eigen::JacobiSVD<Matrix>(m).singularValues();
  return Eigen::BDCSVD<Matrix>(m).singularValues();
}

inline double schatten_norm_of_values(const Eigen::VectorXd& sigma, double p) {
  if (std::isnan(p) || p < 1.0) throw std::invalid_argument("Schatten index must satisfy p >= 1");
  if (sigma.size() == 0) return 0.0;
  if (std::isinf(p)) return sigma.maxCoeff();
  if (p == 1.0) return sigma.sum();
  // Scale by the largest value so large p does not overflow.
  const double top = sigma.maxCoeff();
  if (top == 0.0) return 0.0;
  double acc = 0.0;
  for (double s : sigma) acc += std::pow(s / top, p);
  return top * std::pow(acc, 1.0 / p);
}

/// ||m||_p = (sum_i sigma_i^p)^(1/p); p = kOperatorNorm gives sigma_max.
inline double schatten_norm(const Matrix& m, double p) { return schatten_norm_of_values(singular_values(m), p); }

inline double schatten_norm(const MultipartiteMatrix& c, double p) { return schatten_norm(c.entries(), p); }

inline double operator_norm(const Matrix& m) { return schatten_norm(m, kOperatorNorm); }

/// Hilbert-Schmidt product <A, B> = tr(A^* B).
inline cplx hs_inner(const MultipartiteMatrix& a, const MultipartiteMatrix& b) {
  if (a.dims() != b.dims()) throw std::invalid_argument("hs_inner: shape mismatch");
  return (a.entries().adjoint() * b.entries()).trace();
}

struct SpectralProfile {
  Eigen::VectorXd singular_values;  // descending
  int numerical_rank = 0;
  double tol_used = 0.0;            // absolute threshold applied to the singular values
};

/// Rank with threshold tol * sigma_max.  Default tol is 1e-10 * max(rows, cols).
inline SpectralProfile numerical_rank(const Matrix& m, std::optional<double> tol = std::nullopt) {
  SpectralProfile prof;
  prof.singular_values = singular_values(m);
  const double relative = tol.value_or(1e-10 * static_cast<double>(std::max(m.rows(), m.cols())));
  const double top = prof.singular_values.size() ? prof.singular_values.maxCoeff() : 0.0;
  prof.tol_used = relative * top;
  for (double s : prof.singular_values)
    if (s > prof.tol_used) ++prof.numerical_rank;
  return prof;
}

inline SpectralProfile numerical_rank(const MultipartiteMatrix& c, std::optional<double> tol = std::nullopt) {
  return numerical_rank(c.entries(), tol);
}

/// Eigenvalues of a Hermitian operator, ascending.
inline Eigen::VectorXd hermitian_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace wernerlab
