#pragma once

// Werner states rho_alpha = (1 + alpha F) / (d^2 + alpha d), their partial
// transposes, Schmidt-rank witnesses, and the map C -> psi_C under which
// q^(n)(alpha, C) becomes a witness expectation value on n copies.
//
// Witness vectors live on the interleaved ordering A_1 B_1 A_2 B_2 ... A_n B_n;
// psi_C is first assembled on A_1 ... A_n B_1 ... B_n and then permuted.

#include "wernerlab/forms.hpp"
#include "wernerlab/spectral.hpp"
#include "wernerlab/tensorspace.hpp"

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wernerlab {

struct WernerParams {
  int d = 2;
  double alpha = 0.0;

  void validate() const {
    if (d < 2) throw std::invalid_argument("Werner state needs local dimension d >= 2");
    if (!(std::abs(alpha) <= 1.0)) throw std::invalid_argument("Werner parameter must satisfy |alpha| <= 1");
    if (!(normalization() > 0.0)) throw std::logic_error("Werner normalization d^2 + alpha d must be positive");
  }
  double normalization() const { return static_cast<double>(d) * d + alpha * d; }
};

inline MultipartiteMatrix werner_state(const WernerParams& params) {
  params.validate();
  const int d = params.d;
  const auto one = MultipartiteMatrix::identity({d, d});
  return {{d, d}, (one.entries() + params.alpha * flip(d).entries()) / params.normalization()};
}

/// Normalised maximally entangled vector sum_i e_i (x) e_i / sqrt(d).
inline Vector maximally_entangled(int d) {
  Vector omega = Vector::Zero(static_cast<Eigen::Index>(d) * d);
  for (int i = 0; i < d; ++i) omega(i * d + i) = 1.0;
  return omega / std::sqrt(static_cast<double>(d));
}

/// rho_alpha^{T_1} = (1 + alpha d P_Omega) / (d^2 + alpha d), built from F^{T_1} = d P_Omega.
inline MultipartiteMatrix werner_partial_transpose(const WernerParams& params) {
  params.validate();
  const int d = params.d;
  const Vector omega = maximally_entangled(d);
  const Matrix m = Matrix::Identity(d * d, d * d) + params.alpha * d * omega * omega.adjoint();
  return {{d, d}, m / params.normalization()};
}

/// Smallest eigenvalue of rho_alpha^{T_1}; negative exactly when alpha < -1/d.
inline double werner_ppt_min_eigenvalue(const WernerParams& params) {
  return hermitian_eigenvalues(werner_partial_transpose(params).entries()).minCoeff();
}

/// Amplitudes on (C^d (x) C^d)^{(x)n} in A_1 B_1 ... A_n B_n order.
class WitnessVector {
 public:
  WitnessVector(Vector amplitudes, int d, int copies) : amp_(std::move(amplitudes)), d_(d), n_(copies) {
    if (d < 1 || copies < 1) throw std::invalid_argument("witness needs d >= 1 and at least one copy");
    if (amp_.size() != total_dimension(dims())) throw std::invalid_argument("witness amplitudes do not match (d, n)");
    if (!amp_.allFinite()) throw std::invalid_argument("witness amplitudes must be finite");
  }

  const Vector& amplitudes() const { return amp_; }
  int local_dimension() const { return d_; }
  int copies() const { return n_; }
  Dims dims() const { return Dims(2 * static_cast<std::size_t>(n_), d_); }

  /// The A-systems (even positions) against the B-systems.
  SubsystemSubset declared_cut() const {
    std::vector<int> a;
    for (int k = 0; k < n_; ++k) a.push_back(2 * k);
    return {2 * n_, a};
  }

 private:
  Vector amp_;
  int d_;
  int n_;
};

/// Permutation taking A_1..A_n B_1..B_n to A_1 B_1 ... A_n B_n (result slot k
/// holds input slot perm[k]).
inline std::vector<int> interleave_permutation(int n) {
  std::vector<int> perm(2 * static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    perm[2 * k] = k;
    perm[2 * k + 1] = n + k;
  }
  return perm;
}

/// Rank of the coefficient matrix of psi across `cut`.
inline int schmidt_rank(const Vector& psi, const Dims& dims, const SubsystemSubset& cut,
                        std::optional<double> tol = std::nullopt) {
  if (cut.total() != static_cast<int>(dims.size())) throw std::invalid_argument("cut does not match subsystem count");
  if (cut.empty() || cut.size() == cut.total()) throw std::invalid_argument("cut must split the subsystems");
  std::vector<int> order = cut.members();
  for (int k : cut.complement().members()) order.push_back(k);
  const Vector moved = permute_vector(psi, dims, order);
  Eigen::Index rows = 1;
  for (int k : cut.members()) rows *= dims[k];
  const Eigen::Index cols = moved.size() / rows;
  // Row-major reshape: row index from the cut systems.
  Matrix coeff(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) coeff(i, j) = moved(i * cols + j);
  return numerical_rank(coeff, tol).numerical_rank;
}

inline int schmidt_rank(const WitnessVector& psi, std::optional<SubsystemSubset> cut = std::nullopt,
                        std::optional<double> tol = std::nullopt) {
  return schmidt_rank(psi.amplitudes(), psi.dims(), cut.value_or(psi.declared_cut()), tol);
}

/// psi_C = sum_i v_i (x) conj(w_i) for C = sum_i |v_i><w_i| from the SVD
/// (singular values absorbed into v_i), interleaved.  Components are the
/// entries of C read row-major, so ||psi_C||^2 = ||C||_2^2.
inline WitnessVector psi_from_matrix(const MultipartiteMatrix& c, std::optional<double> rank_tol = std::nullopt) {
  const int n = c.subsystems();
  const int d = c.dims().front();
  for (int dk : c.dims())
    if (dk != d) throw std::invalid_argument("psi_from_matrix needs equal local dimensions; pad_embed first");
  Eigen::JacobiSVD<Matrix> svd(c.entries(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto prof = numerical_rank(c, rank_tol);
  const Eigen::Index big = c.size();
  Vector psi = Vector::Zero(big * big);
  for (int i = 0; i < prof.numerical_rank; ++i) {
    const Vector v = svd.singularValues()(i) * svd.matrixU().col(i);
    const Vector w = svd.matrixV().col(i);
    psi += kron(v, Vector(w.conjugate()));
  }
  const auto perm = interleave_permutation(n);
  return {permute_vector(psi, Dims(2 * static_cast<std::size_t>(n), d), perm), d, n};
}

/// (x)_k rho_{alpha_k}^{T_1} on the interleaved ordering, one factor per copy.
inline MultipartiteMatrix witness_operator(int d, std::span<const double> alphas) {
  if (alphas.empty()) throw std::invalid_argument("witness operator needs at least one copy");
  auto op = werner_partial_transpose({d, alphas[0]});
  for (std::size_t k = 1; k < alphas.size(); ++k) op = kron(op, werner_partial_transpose({d, alphas[k]}));
  return op;
}

/// <psi, (x)_k rho_{alpha_k}^{T_1} psi> with one Werner parameter per copy.
inline double witness_value(const WitnessVector& psi, std::span<const double> alphas) {
  if (static_cast<int>(alphas.size()) != psi.copies())
    throw std::invalid_argument("witness has " + std::to_string(psi.copies()) + " copies but " +
                                std::to_string(alphas.size()) + " Werner parameters were given");
  const auto op = witness_operator(psi.local_dimension(), alphas);
  return psi.amplitudes().dot(op.entries() * psi.amplitudes()).real();
}

/// <psi, (rho_alpha^{T_1})^{(x)n} psi>.
inline double witness_value(const WitnessVector& psi, const WernerParams& params) {
  if (params.d != psi.local_dimension())
    throw std::invalid_argument("witness local dimension does not match Werner dimension");
  const std::vector<double> alphas(psi.copies(), params.alpha);
  return witness_value(psi, alphas);
}

struct Equivalence {
  double q_value = 0.0;        // q^(n)(alpha, C) via partial traces
  double witness_value = 0.0;  // (d^2 + alpha d)^n <psi_C, (rho^{T_1})^{(x)n} psi_C>
  double ratio = 0.0;          // witness_value / q_value (NaN when q_value == 0)
};

inline Equivalence q_witness_equivalence(const MultipartiteMatrix& c, double alpha) {
  const WernerParams params{c.dims().front(), alpha};
  params.validate();
  Equivalence eq;
  eq.q_value = q_distillability(alpha, c);
  eq.witness_value = witness_value(psi_from_matrix(c), params) * std::pow(params.normalization(), c.subsystems());
  eq.ratio = eq.q_value != 0.0 ? eq.witness_value / eq.q_value : std::nan("");
  return eq;
}

/// Expectation values of psi_C against rho_{1/2} (x) rho_{-1/2} and
/// rho_{-1/2} (x) rho_{1/2} for bipartite C, with the q_(0,1) and q_(1,0)
/// values at -1/2 they are proportional to.
struct MixedSignWitness {
  double plus_minus = 0.0;   // <psi_C, (rho_{1/2} (x) rho_{-1/2})^{T_1} psi_C>
  double minus_plus = 0.0;   // <psi_C, (rho_{-1/2} (x) rho_{1/2})^{T_1} psi_C>
  double q01 = 0.0;          // q_(0,1)(-1/2, C)
  double q10 = 0.0;          // q_(1,0)(-1/2, C)
  double scale = 0.0;        // (d^2 + d/2)(d^2 - d/2); plus_minus * scale = q01
};

inline MixedSignWitness mixed_sign_witness(const MultipartiteMatrix& c) {
  if (c.subsystems() != 2) throw std::invalid_argument("mixed-sign witness needs a bipartite matrix");
  const int d = c.dims().front();
  const auto psi = psi_from_matrix(c);
  MixedSignWitness out;
  const double pm[] = {0.5, -0.5};
  const double mp[] = {-0.5, 0.5};
  out.plus_minus = witness_value(psi, pm);
  out.minus_plus = witness_value(psi, mp);
  out.q01 = q_form({{0, 1}, 2.0, 2.0, -0.5}, c);
  out.q10 = q_form({{1, 0}, 2.0, 2.0, -0.5}, c);
  out.scale = WernerParams{d, 0.5}.normalization() * WernerParams{d, -0.5}.normalization();
  return out;
}

}  // namespace wernerlab
